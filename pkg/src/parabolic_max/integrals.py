"""Real-axis integral formulas for E M and closed-form Airy integral checks.

E M has three equivalent forms over [0, inf) built from Ai and Bi at real
arguments.  For large t the ratio rho = Ai/Bi ~ exp(-4/3 t^1.5) / 2 is taken
from the scaled kernel, so nothing overflows or underflows before the
cutoff.  The identity suite compares quadratures of shifted Airy products
with their closed forms; these serve as ground truth for the quadrature
engine and the zero table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import asymptotics as asy
from .airy import AI0, AIP0, ai_primitive, airy, airy_scaled, DomainError
from .quadrature import QuadratureSpec, integrate
from .scorer import scorer_gi
from .series import MomentSet, SeriesConfig, g_integrals
from .zeros import zero_table

__all__ = [
    "IdentityReport",
    "em_via_integral",
    "integral_moments",
    "em3_integrand",
    "em_integrand",
    "laplace_airy_check",
    "airy_identity_suite",
    "parseval_sum",
    "FORMS",
]

FORMS = ("em3", "em2", "em4")
SQRT3 = math.sqrt(3.0)
TWO_23 = 2.0 ** (2.0 / 3.0)
SCALED_FROM = 6.0
DEFAULT_SPEC = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-13, max_subdivisions=2000)
IDENTITY_TOL = 1e-9


@dataclass(frozen=True)
class IdentityReport:
    name: str
    lhs: float
    rhs: float
    abs_gap: float
    tol: float
    passed: bool

    @classmethod
    def compare(cls, name, lhs, rhs, tol=IDENTITY_TOL):
        gap = abs(float(lhs) - float(rhs))
        return cls(name, float(lhs), float(rhs), gap, tol, bool(gap <= tol))


# ------------------------------------------------------------------- E M


def _ratio_parts(t):
    """(rho, inv_bi2) with rho = Ai/Bi and inv_bi2 = 1/Bi^2 at t >= 0."""
    t = np.asarray(t, dtype=float)
    rho = np.empty_like(t)
    inv = np.empty_like(t)
    near = t < SCALED_FROM
    if near.any():
        a, _, b, _ = airy(t[near])
        rho[near] = a / b
        inv[near] = 1.0 / (b * b)
    far = ~near
    if far.any():
        tf = t[far]
        a, _, b, _ = airy_scaled(tf)
        zeta = 2.0 / 3.0 * tf * np.sqrt(tf)
        rho[far] = a / b * np.exp(-2.0 * zeta)
        inv[far] = np.exp(-2.0 * zeta) / (b * b)
    return rho, inv


def em3_integrand(t, scaled=True):
    """(Ai^2 + sqrt3 Ai Bi) / (Ai^2 + Bi^2), via rho = Ai/Bi when scaled."""
    t = np.asarray(t, dtype=float)
    if not scaled:
        a, _, b, _ = airy(t)
        return (a * a + SQRT3 * a * b) / (a * a + b * b)
    rho, _ = _ratio_parts(t)
    return (rho * rho + SQRT3 * rho) / (rho * rho + 1.0)


def _em2_integrand(t):
    rho, inv = _ratio_parts(t)
    d = 1.0 + rho * rho
    return t * inv * (SQRT3 - SQRT3 * rho * rho + 2.0 * rho) / (d * d)


def _em4_integrand(t):
    rho, _ = _ratio_parts(t)
    # Ai / (Ai + i Bi) = rho / (rho + i), scaled by (1 + i sqrt3)
    z = (1.0 + 1j * SQRT3) * (rho / (rho + 1j))
    return z.real


def em_integrand(form, t):
    """Integrand of the chosen form, including its constant factor."""
    if form == "em3":
        return TWO_23 * em3_integrand(t)
    if form == "em2":
        return TWO_23 / math.pi * _em2_integrand(t)
    if form == "em4":
        return TWO_23 * _em4_integrand(t)
    raise ValueError(f"unknown form {form!r}; expected one of {FORMS}")


def _em_tail_bound(form, T):
    # Ai(t) <= e^-z / (2 sqrt(pi) t^1/4), Bi(t) >= e^z / (sqrt(pi) t^1/4) for
    # t >= 1, so rho <= e^-2z / 2 and 1/Bi^2 <= pi sqrt(t) e^-2z.  The forms
    # are bounded by 2 rho or 2 t / Bi^2; the integrals of e^{-4/3 t^1.5}
    # t^p beyond T are at most T^(p - 1/2) e^{-4/3 T^1.5} / 2 for p >= 1/2.
    e = math.exp(-4.0 / 3.0 * T**1.5)
    if form == "em2":
        return 2.0 * TWO_23 * T * e
    return TWO_23 * e / math.sqrt(T)


def em_cutoff(form, abs_tol):
    T = 2.0
    while _em_tail_bound(form, T) >= abs_tol / 10.0:
        T += 0.5
    return T


def em_via_integral(form: str = "em3", spec: QuadratureSpec | None = None):
    """E M from one of the real-axis integral forms ('em3', 'em2', 'em4').

    Returns a QuadResult whose error includes the analytic tail bound.
    """
    if form not in FORMS:
        raise ValueError(f"unknown form {form!r}; expected one of {FORMS}")
    spec = spec or DEFAULT_SPEC
    T = em_cutoff(form, spec.abs_tol)
    breaks = [b for b in (0.5, 1.0, 2.0, 3.0, 4.0, SCALED_FROM) if b < T]
    res = integrate(lambda t: em_integrand(form, t), 0.0, T, spec, breakpoints=breaks)
    return type(res)(res.value, res.error + _em_tail_bound(form, T), res.panels, res.evaluations)


def integral_moments(cfg: SeriesConfig | None = None) -> MomentSet:
    """Moments by quadrature: E M from the em3 Airy integral, the rest from
    integrals of the series G (see :func:`parabolic_max.series.g_integrals`)."""
    (en, en_e), (en2, en2_e), (em2, em2_e) = g_integrals(cfg)
    em_res = em_via_integral("em3")
    em, em_e = float(em_res.value), float(em_res.error)
    err = {
        "en": en_e,
        "em": em_e,
        "en2": en2_e,
        "em2": em2_e,
        "var_n": en2_e + 2 * abs(en) * en_e,
        "var_m": em2_e + 2 * abs(em) * em_e,
    }
    return MomentSet(en, em, en2, em2, en2 - en * en, em2 - em * em, err)


# ------------------------------------------------ exponential moment of Ai


def laplace_airy_check(z: float, spec: QuadratureSpec | None = None, tol: float = IDENTITY_TOL,
                       neg_cut: float | None = None) -> IdentityReport:
    """Integral of e^{z t} Ai(t) over the real line against e^{z^3 / 3}.

    The negative side is cut where the envelope bound
    e^{-z T} T^{-1/4} / (z sqrt(pi)) drops below tol / 10 (or at
    ``neg_cut``); that bound is what makes the truncation explicit.
    """
    if not (math.isfinite(z) and z > 0):
        raise DomainError("z must be positive")
    spec = spec or DEFAULT_SPEC
    if neg_cut is None:
        neg_cut = 1.0
        while math.exp(-z * neg_cut) * neg_cut**-0.25 / (z * math.sqrt(math.pi)) >= tol / 10.0:
            neg_cut += 0.5
    # positive side: exponent z t - (2/3) t^1.5 falls below -45
    pos_cut = max(4.0, z * z)
    while z * pos_cut - 2.0 / 3.0 * pos_cut**1.5 > -45.0:
        pos_cut += 0.5
    n_zeros = int(np.searchsorted(-zero_table(4096).a, neg_cut))
    breaks = sorted(zero_table(max(n_zeros, 1)).a[:n_zeros].tolist())

    def f(t):
        return np.exp(z * t) * airy(t)[0]

    neg = integrate(f, -neg_cut, 0.0, spec, breakpoints=breaks)
    pos = integrate(f, 0.0, pos_cut, spec, breakpoints=[p for p in (1.0, 2.0, z * z) if 0 < p < pos_cut])
    return IdentityReport.compare(f"exp-moment z={z:g}", math.exp(z**3 / 3.0), neg.value + pos.value, tol)


# --------------------------------------------------------- identity suite


def _product_integral(shifts, weight_power, spec):
    """Integral over [0, inf) of x^p * prod Ai(x + s) for the given shifts."""
    shifts = [float(s) for s in shifts]
    low = min(shifts)
    # beyond x + low = 12 the product is below e^-55
    top = max(12.0 - low, 12.0)
    breaks = set()
    for s in shifts:
        if s < 0:
            zs = zero_table(int(np.searchsorted(-zero_table(4096).a, -s)) + 1).a
            breaks.update(float(z - s) for z in zs if 0 < z - s < top)
    breaks.add(-low if 0 < -low < top else 1.0)

    def f(x):
        out = x**weight_power if weight_power else np.ones_like(x)
        for s in shifts:
            out = out * airy(x + s)[0]
        return out

    return integrate(f, 0.0, top, spec, breakpoints=sorted(breaks)).value


def _two_point(a, b):
    ai_a, aip_a, _, _ = airy(a)
    ai_b, aip_b, _, _ = airy(b)
    return float(ai_a), float(aip_a), float(ai_b), float(aip_b)


def _q(a, b):
    """Integral of Ai(x+a) Ai(x+b) over [0, inf), closed form for a != b."""
    A, Ap, B, Bp = _two_point(a, b)
    return (A * Bp - Ap * B) / (a - b)


def _qx(a, b):
    A, Ap, B, Bp = _two_point(a, b)
    d = a - b
    return (a + b) / d**2 * A * B - 2.0 / d**2 * Ap * Bp + 2.0 / d**3 * (A * Bp - Ap * B)


def airy_identity_suite(spec: QuadratureSpec | None = None, k_max: int = 4, tol: float = IDENTITY_TOL):
    """Closed-form Airy integrals at the zeros and at generic points."""
    spec = spec or DEFAULT_SPEC
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    tab = zero_table(k_max)
    a, aip = tab.a, tab.aip
    out = []
    for k in range(k_max):
        ak, dk = float(a[k]), float(aip[k])
        K = k + 1
        out.append(IdentityReport.compare(f"norm k={K}", dk * dk, _product_integral([ak, ak], 0, spec), tol))
        out.append(
            IdentityReport.compare(
                f"first-moment norm k={K}", -2.0 / 3.0 * ak * dk * dk, _product_integral([ak, ak], 1, spec), tol
            )
        )
        prim = ai_primitive(ak)
        out.append(
            IdentityReport.compare(
                f"first-moment weight k={K}", -dk - ak * prim, _product_integral([ak], 1, spec), tol
            )
        )
        out.append(
            IdentityReport.compare(
                f"primitive at zero k={K}", -math.pi * dk * float(scorer_gi(ak)), prim, tol
            )
        )
        out.append(
            IdentityReport.compare(f"overlap with Ai k={K}", -AI0 * dk / ak, _product_integral([0.0, ak], 0, spec), tol)
        )
        out.append(
            IdentityReport.compare(
                f"first moment with Ai k={K}",
                -2.0 / ak**2 * AIP0 * dk - 2.0 / ak**3 * AI0 * dk,
                _product_integral([0.0, ak], 1, spec),
                tol,
            )
        )
        for l in range(k + 1, k_max):
            al, dl = float(a[l]), float(aip[l])
            L = l + 1
            out.append(IdentityReport.compare(f"orthogonality k={K} l={L}", 0.0, _product_integral([ak, al], 0, spec), tol))
            out.append(
                IdentityReport.compare(
                    f"first moment pair k={K} l={L}",
                    -2.0 / (ak - al) ** 2 * dk * dl,
                    _product_integral([ak, al], 1, spec),
                    tol,
                )
            )
    pa, pb = 0.3, -1.1
    out.append(IdentityReport.compare("two-point a=0.3 b=-1.1", _q(pa, pb), _product_integral([pa, pb], 0, spec), tol))
    out.append(
        IdentityReport.compare("two-point first moment a=0.3 b=-1.1", _qx(pa, pb), _product_integral([pa, pb], 1, spec), tol)
    )
    # the a != b formula extends continuously to a = b
    d = 1e-4

    def sym(dd):
        return 0.5 * (_q(pb + dd, pb) + _q(pb - dd, pb))

    limit = (4.0 * sym(d / 2) - sym(d)) / 3.0
    A, Ap, _, _ = _two_point(pb, pb)
    out.append(IdentityReport.compare("two-point diagonal limit b=-1.1", Ap * Ap - pb * A * A, limit, tol))
    out.append(IdentityReport.compare("diagonal closed form b=-1.1", Ap * Ap - pb * A * A, _product_integral([pb, pb], 0, spec), tol))
    # power recursion at n = 3: integral of x^3 Ai^2 = (3/7) Ai'(0)^2
    out.append(IdentityReport.compare("power recursion n=3", 3.0 / 7.0 * AIP0 * AIP0, _product_integral([0.0, 0.0], 3, spec), tol))
    for z in (0.5, 1.0, 2.0):
        out.append(laplace_airy_check(z, spec, tol))
    out.append(parseval_sum(1000, tol=tol))
    return out


# ---------------------------------------------------------------- Parseval


def parseval_sum(k_max: int = 1000, tail: bool = True, tol: float = IDENTITY_TOL) -> IdentityReport:
    """Sum of a_k^-2 over k <= k_max (plus its Euler-Maclaurin tail) against
    (Ai'(0)/Ai(0))^2."""
    if k_max < 3:
        raise ValueError("k_max must be at least 3")
    tab = zero_table(k_max + 8)
    partial = math.fsum((1.0 / tab.a[:k_max] ** 2).tolist())
    if tail:
        # 1/y^2 times the zero density ~ sqrt(y)/pi decays like y^-1.5
        lead = (lambda y: y**-1.5 / math.pi, lambda Y: 2.0 / (math.pi * math.sqrt(Y)))
        value, _ = asy.smooth_tail(lambda y: 1.0 / (y * y), -tab.a, k_max + 1, leading=lead)
        partial += float(value)
    target = (AIP0 / AI0) ** 2
    name = f"zero Parseval K={k_max}" + ("" if tail else " untailed")
    return IdentityReport.compare(name, target, partial, tol)
