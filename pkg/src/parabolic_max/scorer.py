"""Scorer functions Hi, Gi on the nonpositive axis and the weight
phi(a) = pi Hi(a) + 1/a at negative arguments.

For -x >= ASYMPTOTIC_FROM the divergent expansion

    pi Hi(-y) = sum_{l>=0} (-1)^l (3l)! / (3^l l!) y^(-3l-1)

is summed up to its smallest term; its error there is below 1e-15
relative.  Closer to the origin Hi is integrated from its defining Laplace
integral, and phi from the cancellation-free form

    phi(a) = integral_0^inf (exp(-t^3/3) - 1) exp(a t) dt,   a < 0,

which holds because the integral of exp(a t) over [0, inf) is -1/a.
"""

from __future__ import annotations

import math

import numpy as np

from .airy import DomainError, airy
from .quadrature import QuadratureSpec, integrate

__all__ = [
    "ASYMPTOTIC_FROM",
    "scorer_hi",
    "scorer_gi",
    "phi_weight",
    "hi_asymptotic",
    "phi_asymptotic",
    "phi_integral",
    "hi_integral",
]

ASYMPTOTIC_FROM = 14.0

_SPEC = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-15, max_subdivisions=2000)


def _expansion(y, start):
    """Sum (-1)^l (3l)!/(3^l l!) y^(-3l-1) over l >= start, optimally truncated."""
    y = np.asarray(y, dtype=float)
    y3 = y**3
    term = 1.0 / y
    for l in range(1, start + 1):
        term = -term * (3 * l - 2) * (3 * l - 1) / y3
    total = np.zeros_like(y)
    active = np.ones(y.shape, dtype=bool)
    prev = np.full(y.shape, np.inf)
    l = start
    while active.any():
        mag = np.abs(term)
        active &= mag < prev
        total = np.where(active, total + term, total)
        active &= mag > 1e-18 * np.abs(total)
        prev = mag
        l += 1
        term = -term * (3 * l - 2) * (3 * l - 1) / y3
        if l > 400:
            break
    return total


def hi_asymptotic(x):
    """Hi(x) for x <= -ASYMPTOTIC_FROM by the large-argument expansion."""
    return _expansion(-np.asarray(x, dtype=float), 0) / math.pi


def phi_asymptotic(a):
    """phi(a) = pi Hi(a) + 1/a from the expansion with the l = 0 term removed."""
    return _expansion(-np.asarray(a, dtype=float), 1)


def hi_integral(x: float) -> float:
    """Hi(x), x <= 0, by adaptive quadrature of its Laplace integral."""

    def f(t):
        return np.exp(x * t - t**3 / 3.0)

    # exponent <= -t^3/3 for x <= 0: stop once t^3/3 > 40
    upper = 3.0 * 40.0 ** (1.0 / 3.0)
    res = integrate(f, 0.0, upper, _SPEC)
    return res.value / math.pi


def phi_integral(a: float) -> float:
    """phi(a) for a < 0 from the cancellation-free integral."""
    if not a < 0:
        raise DomainError("phi is defined here for negative arguments")
    scale = a**4

    def f(t):
        return np.expm1(-(t**3) / 3.0) * np.exp(a * t) * scale

    # |integrand| <= a^4 exp(a t): past t = 46/|a| it is below e^-46 a^4
    upper = (46.0 + 4.0 * math.log(-a)) / -a
    res = integrate(f, 0.0, upper, _SPEC)
    return res.value / scale


def scorer_hi(x):
    """Scorer function Hi(x) for x <= 0 (absolute accuracy ~1e-15)."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("argument must be finite")
    if np.any(arr > 0):
        raise DomainError("Hi is supported on x <= 0 only")
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    far = flat <= -ASYMPTOTIC_FROM
    out[far] = hi_asymptotic(flat[far])
    for i in np.flatnonzero(~far):
        out[i] = hi_integral(float(flat[i]))
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def scorer_gi(x):
    """Gi(x) = Bi(x) - Hi(x) for x <= 0."""
    return airy(x)[2] - scorer_hi(x)


def phi_weight(a):
    """phi(a) = pi Hi(a) + 1/a at a < 0 with full relative accuracy."""
    arr = np.asarray(a, dtype=float)
    if np.any(~(arr < 0)):
        raise DomainError("phi is defined here for negative arguments")
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    far = flat <= -ASYMPTOTIC_FROM
    out[far] = phi_asymptotic(flat[far])
    for i in np.flatnonzero(~far):
        out[i] = phi_integral(float(flat[i]))
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)
