"""Smooth continuation of Airy-zero summands and tail summation.

Writing Ai(-y) = M cos(Phi(y) - pi/4), Bi(-y) = -M sin(Phi(y) - pi/4) with
a modulus M(y) > 0 and an increasing phase Phi(y), the k-th zero satisfies
Phi(|a_k|) = (4k - 1) pi / 4.  Every summand used by the series is a
smooth function of y = |a_k| times, at most, a factor (-1)^k:

    Ai'(a_k)                = (-1)^(k+1) / (pi M(y))
    Bi(a_k)                 = (-1)^k M(y)
    Ai(a_k + d) / Ai'(a_k)  = pi M(y - d) M(y) sin D
    Ai'(a_k + d) / Ai'(a_k) = M(y) (pi M'(d - y) sin D + cos D / M(y - d))

with D = Phi(y) - Phi(y - d).  Sums over k >= K are then evaluated with the
Euler-Maclaurin formula in the continuous index u, Phi(y(u)) = (4u-1)pi/4,
whose Jacobian is du/dy = 1 / (pi^2 M(y)^2).  Alternating sums are first
grouped in consecutive pairs.

The module also carries the leading-order large-k expansions of the zero
data; they are used for rough error bounds and in tests.
"""

from __future__ import annotations

import math

import numpy as np

from . import _pykernels
from ._tables import AI0, AIP0
from .airy import airy
from .quadrature import QuadratureSpec, integrate, integrate_geometric
from .scorer import phi_asymptotic

__all__ = [
    "modulus",
    "modulus_phase",
    "phase_difference",
    "zero_weight",
    "shifted_ratio",
    "shifted_derivative_ratio",
    "phi_smooth",
    "smooth_tail",
    "alternating_tail",
    "leading_abs_zero",
    "leading_hi",
    "leading_phi",
    "leading_bi",
    "leading_aip",
    "leading_g1",
    "leading_g2",
    "leading_shifted_ai",
    "leading_shifted_aip",
]

_FAR = 10.25  # modulus-phase series used for y >= _FAR, the kernel below


def _series_parts(y):
    zeta = 2.0 / 3.0 * y * np.sqrt(y)
    P, Q, R, S = _pykernels.oscillatory_series(zeta)
    return zeta, P, Q, R, S


def modulus_phase(y):
    """Return (M, Phi - zeta, dM/dX) at X = -y for y >= 0.

    The phase is returned relative to zeta = (2/3) y^1.5 so that phase
    differences at large y can be formed without cancellation.
    """
    y = np.asarray(y, dtype=float)
    M = np.empty_like(y)
    beta = np.empty_like(y)
    dM = np.empty_like(y)
    far = y >= _FAR
    if far.any():
        yf = y[far]
        _, P, Q, R, S = _series_parts(yf)
        m2 = (P * P + Q * Q) / (math.pi * np.sqrt(yf))
        M[far] = np.sqrt(m2)
        beta[far] = -np.arctan2(Q, P)
        dM[far] = (Q * R - P * S) / (math.pi * M[far])
    near = ~far
    if near.any():
        yn = y[near]
        ai, aip, bi, bip = airy(-yn)
        M[near] = np.hypot(ai, bi)
        zeta = 2.0 / 3.0 * yn * np.sqrt(yn)
        raw = np.arctan2(-bi, ai) + math.pi / 4 - zeta
        beta[near] = raw - 2 * math.pi * np.rint(raw / (2 * math.pi))
        dM[near] = (ai * aip + bi * bip) / M[near]
    return M, beta, dM


def modulus(y):
    return modulus_phase(y)[0]


def _zeta_difference(y, d):
    # (2/3)(y^1.5 - (y-d)^1.5) without cancellation
    z = y - d
    return 2.0 / 3.0 * d * (y * y + y * z + z * z) / (y * np.sqrt(y) + z * np.sqrt(z))


def phase_difference(y, d):
    """Phi(y) - Phi(y - d) for 0 <= d <= y (broadcasting)."""
    y, d = np.broadcast_arrays(np.asarray(y, float), np.asarray(d, float))
    _, b1, _ = modulus_phase(y)
    _, b2, _ = modulus_phase(y - d)
    return _zeta_difference(y, d) + (b1 - b2)


def zero_weight(y):
    """du/dy = 1 / (pi^2 M(y)^2) for the continuous zero index u."""
    M = modulus(y)
    return 1.0 / (math.pi**2 * M * M)


def shifted_ratio(y, d):
    """Continuation of Ai(a_k + d) / Ai'(a_k) to real y = |a_k|."""
    y, d = np.broadcast_arrays(np.asarray(y, float), np.asarray(d, float))
    M1, b1, _ = modulus_phase(y)
    M2, b2, _ = modulus_phase(y - d)
    D = _zeta_difference(y, d) + (b1 - b2)
    return math.pi * M1 * M2 * np.sin(D)


def shifted_derivative_ratio(y, d):
    """Continuation of Ai'(a_k + d) / Ai'(a_k) to real y = |a_k|."""
    y, d = np.broadcast_arrays(np.asarray(y, float), np.asarray(d, float))
    M1, b1, _ = modulus_phase(y)
    M2, b2, dM2 = modulus_phase(y - d)
    D = _zeta_difference(y, d) + (b1 - b2)
    return M1 * (math.pi * dM2 * np.sin(D) + np.cos(D) / M2)


def phi_smooth(y):
    """phi at a = -y from the large-argument expansion (valid for y >= 14)."""
    return phi_asymptotic(-np.asarray(y, dtype=float))


# ------------------------------------------------------------------ tails


_TAIL_SPEC = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-12, max_subdivisions=2000)


def _em_corrections(f):
    """Euler-Maclaurin end corrections from values f[-2..2] around the start."""
    fm2, fm1, f0, f1, f2 = f
    d1 = (fm2 - 8 * fm1 + 8 * f1 - f2) / 12.0
    d3 = (-fm2 + 2 * fm1 - 2 * f1 + f2) / 2.0
    return 0.5 * f0 - d1 / 12.0 + d3 / 720.0, abs(d3) / 720.0


def smooth_tail(F, y_zeros, K, spec=_TAIL_SPEC, leading=None):
    """Sum of F(y_k) over k >= K for a smooth, decaying F.

    ``F`` maps an array of y to an array of shape (..., len(y)); ``y_zeros``
    holds |a_k| for k = 1..K+2 at least.  The result has the leading shape of
    F's output; the error estimate is the size of the last correction term
    plus the quadrature error.

    For slowly decaying integrands pass ``leading = (g, G)``: g(y)
    approximates F(y) du/dy and G(Y) is its exact integral over [Y, inf);
    only the difference is integrated numerically.
    """
    yK = y_zeros[K - 1]
    stencil = np.asarray(y_zeros[K - 3 : K + 2])
    vals = np.moveaxis(np.asarray(F(stencil)), -1, 0)
    corr, corr_err = _em_corrections(vals)

    if leading is None:

        def integrand(y):
            return np.asarray(F(y)) * zero_weight(y)

        base = 0.0
    else:
        g, G = leading

        def integrand(y):
            return np.asarray(F(y)) * zero_weight(y) - g(y)

        base = G(yK)

    first = 4.0 * (y_zeros[K] - yK)
    res = integrate_geometric(integrand, yK, first, spec)
    value = res.value + base + corr
    err = np.max(corr_err) + res.error
    return value, err


def alternating_tail(F, y_zeros, K, spec=_TAIL_SPEC):
    """Sum of (-1)^k F(y_k) over k >= K by pairing k = 2j with 2j + 1.

    K must be even.  The paired sequence g(j) = F(y_2j) - F(y_2j+1) is
    summed with Euler-Maclaurin; the integral of g over [J, inf) equals half
    the integral of F(y(u)) du over [2J, 2J+1].
    """
    if K % 2:
        raise ValueError("pairing needs an even starting index")
    J = K // 2
    js = np.arange(J - 2, J + 3)
    even = np.asarray(y_zeros[2 * js - 1])
    odd = np.asarray(y_zeros[2 * js])
    g = np.moveaxis(np.asarray(F(even)) - np.asarray(F(odd)), -1, 0)
    corr, corr_err = _em_corrections(g)
    lo, hi = y_zeros[2 * J - 1], y_zeros[2 * J]

    def integrand(y):
        return np.asarray(F(y)) * zero_weight(y)

    res = integrate(integrand, lo, hi, spec)
    value = 0.5 * res.value + corr
    err = np.max(corr_err) + 0.5 * res.error
    return value, err


# ------------------------------------------------ leading-order expansions

_C_ZERO = (3 * math.pi) ** (2 / 3) / 2 ** (2 / 3)


def leading_abs_zero(k):
    """|a_k| ~ (3 pi / 2)^(2/3) (k^(2/3) - k^(-1/3) / 6)."""
    k = np.asarray(k, dtype=float)
    return _C_ZERO * (k ** (2 / 3) - k ** (-1 / 3) / 6)


def leading_hi(k):
    k = np.asarray(k, dtype=float)
    return 2 ** (2 / 3) / (3 ** (2 / 3) * math.pi ** (5 / 3)) * (k ** (-2 / 3) + k ** (-5 / 3) / 6)


def leading_phi(k):
    k = np.asarray(k, dtype=float)
    return -(2 ** (11 / 3)) / (3 ** (8 / 3) * math.pi ** (8 / 3)) * k ** (-8 / 3)


def leading_bi(k):
    k = np.asarray(k, dtype=float)
    sign = np.where(np.asarray(k, dtype=np.int64) % 2 == 0, 1.0, -1.0)
    return sign * 2 ** (1 / 6) / (3 ** (1 / 6) * math.pi ** (2 / 3)) * k ** (-1 / 6)


def leading_aip(k):
    k = np.asarray(k, dtype=float)
    sign = np.where(np.asarray(k, dtype=np.int64) % 2 == 1, 1.0, -1.0)
    return sign * 3 ** (1 / 6) / (2 ** (1 / 6) * math.pi ** (1 / 3)) * k ** (1 / 6)


def leading_g1(j):
    """phi(2j) Bi(a_2j) + phi(2j+1) Bi(a_2j+1) to leading order."""
    j = np.asarray(j, dtype=float)
    return -17 * 3 ** (1 / 6) / (162 * math.pi ** (10 / 3)) * j ** (-23 / 6)


def leading_g2(j):
    """a_2j phi(2j) Bi(a_2j) + a_2j+1 phi(2j+1) Bi(a_2j+1) to leading order."""
    j = np.asarray(j, dtype=float)
    return 13 * 3 ** (5 / 6) / (162 * math.pi ** (8 / 3)) * j ** (-19 / 6)


def leading_shifted_ai(k, x):
    """Ai(a_k + 2^(1/3) x) for fixed x and large k, to leading order."""
    k = np.asarray(k, dtype=float)
    sign = np.where(np.asarray(k, dtype=np.int64) % 2 == 1, 1.0, -1.0)
    amp = 2 ** (1 / 6) / (3 ** (1 / 6) * math.pi ** (2 / 3)) * k ** (-1 / 6)
    return sign * amp * np.sin((3 * math.pi) ** (1 / 3) * x * k ** (1 / 3))


def leading_shifted_aip(k, x):
    """Ai'(a_k + 2^(1/3) x) for fixed x and large k, to leading order."""
    k = np.asarray(k, dtype=float)
    sign = np.where(np.asarray(k, dtype=np.int64) % 2 == 1, 1.0, -1.0)
    amp = 3 ** (1 / 6) / (2 ** (1 / 6) * math.pi ** (1 / 3)) * k ** (1 / 6)
    return sign * amp * np.cos((3 * math.pi) ** (1 / 3) * x * k ** (1 / 3))


AIRY_LOG_DERIVATIVE_0 = AIP0 / AI0
