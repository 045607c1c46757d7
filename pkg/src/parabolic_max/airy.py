"""Real-argument Airy functions, their exponentially scaled forms and the
upper primitive AI(x) = integral of Ai from x to infinity."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _tables
from ._backend import kernels
from .quadrature import QuadratureSpec, integrate

__all__ = [
    "DomainError",
    "AiryValues",
    "ScaledAiryValues",
    "AI0",
    "AIP0",
    "BI0",
    "BIP0",
    "BI_OVERFLOW_X",
    "airy",
    "airy_scaled",
    "airy_eval",
    "airy_eval_scaled",
    "ai",
    "aip",
    "ai_primitive",
]

AI0 = _tables.AI0
AIP0 = _tables.AIP0
BI0 = _tables.BI0
BIP0 = _tables.BIP0

MAX_ABS_ARG = 1.0e5
# largest x with exp((2/3) x^1.5) * x^(1/4) / sqrt(pi) safely below DBL_MAX
BI_OVERFLOW_X = 104.0


class DomainError(ValueError):
    """Argument outside the documented domain of an operation."""


@dataclass(frozen=True)
class AiryValues:
    x: float
    ai: float
    bi: float
    aip: float
    bip: float

    @property
    def wronskian(self) -> float:
        return self.ai * self.bip - self.aip * self.bi


@dataclass(frozen=True)
class ScaledAiryValues:
    """Ai, Ai' times exp(zeta) and Bi, Bi' times exp(-zeta), zeta = (2/3) x^1.5."""

    x: float
    ai_scaled: float
    bi_scaled: float
    aip_scaled: float
    bip_scaled: float

    @property
    def zeta(self) -> float:
        return 2.0 / 3.0 * self.x**1.5


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("Airy argument must be finite")
    return arr


def airy(x):
    """Vectorised (Ai, Ai', Bi, Bi') for |x| <= 1e5.

    Raises OverflowError where Bi itself is not representable; use
    ``airy_scaled`` there.
    """
    arr = _as_array(x)
    if arr.size and np.max(np.abs(arr)) > MAX_ABS_ARG:
        raise DomainError(f"|x| must not exceed {MAX_ABS_ARG:g}")
    if arr.size and np.max(arr) > BI_OVERFLOW_X:
        raise OverflowError(
            f"Bi overflows for x > {BI_OVERFLOW_X}; use airy_eval_scaled / airy_scaled"
        )
    flat = arr.ravel()
    out = kernels.airy_kernel(flat, False)
    return tuple(v.reshape(arr.shape) for v in out)


def airy_scaled(x):
    """Vectorised scaled values (Ai e^z, Ai' e^z, Bi e^-z, Bi' e^-z), x >= 0."""
    arr = _as_array(x)
    if arr.size and np.min(arr) < 0:
        raise DomainError("scaled Airy values are defined for x >= 0 only")
    flat = arr.ravel()
    out = kernels.airy_kernel(flat, True)
    return tuple(v.reshape(arr.shape) for v in out)


def ai(x):
    return airy(x)[0]


def aip(x):
    return airy(x)[1]


def airy_eval(x: float) -> AiryValues:
    """Ai, Bi and their derivatives at a single real point."""
    a, ap, b, bp = (float(v[0]) for v in airy(np.array([x], dtype=float)))
    return AiryValues(float(x), a, b, ap, bp)


def airy_eval_scaled(x: float) -> ScaledAiryValues:
    """Exponentially scaled Airy values at a single point x >= 0."""
    if not math.isfinite(x):
        raise DomainError("Airy argument must be finite")
    if x < 0:
        raise DomainError("scaled Airy values are defined for x >= 0 only")
    a, ap, b, bp = (float(v[0]) for v in airy_scaled(np.array([x], dtype=float)))
    return ScaledAiryValues(float(x), a, b, ap, bp)


_PRIMITIVE_SPEC = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-14, max_subdivisions=4000)


def ai_primitive(x: float) -> float:
    """AI(x), the integral of Ai over [x, inf), for x in [-50, 50].

    For x <= 0 this is 1/3 plus the integral of Ai over [x, 0]; for x > 0
    the upper integral is taken directly, which keeps AI strictly positive
    when it is tiny.
    """
    if not math.isfinite(x):
        raise DomainError("argument must be finite")
    if not -50.0 <= x <= 50.0:
        raise DomainError("ai_primitive is supported on [-50, 50]")
    if x <= 0.0:
        # split at Airy-zero spacing so panels see at most a few oscillations
        width = math.pi / math.sqrt(max(-x, 1.0))
        cuts = np.arange(x, 0.0, width / 2)[1:]
        res = integrate(ai, x, 0.0, _PRIMITIVE_SPEC, breakpoints=cuts)
        return 1.0 / 3.0 + res.value

    def scaled_integrand(t):
        # Ai(t) = ai_scaled(t) * exp(-zeta(t)); factor out exp(-zeta(x))
        zeta_t = 2.0 / 3.0 * t * np.sqrt(t)
        return airy_scaled(t)[0] * np.exp(zeta_x - zeta_t)

    zeta_x = 2.0 / 3.0 * x * math.sqrt(x)
    # stop where the integrand has fallen by e^-45 relative to its value at x
    upper = (1.5 * (zeta_x + 45.0)) ** (2.0 / 3.0)
    res = integrate(scaled_integrand, x, upper, _PRIMITIVE_SPEC)
    return res.value * math.exp(-zeta_x)
