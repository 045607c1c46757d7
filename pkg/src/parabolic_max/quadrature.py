"""Adaptive Gauss-Kronrod quadrature (10-point Gauss / 21-point Kronrod).

The node set is derived at import time: the Kronrod extension polynomial is
solved in exact rational arithmetic, its roots are polished by rational
Newton steps, and the weights come from the moment equations in the
Legendre basis.  Integrands are vectorised: they receive a 1-D array of
abscissae and return either an array of the same length or an array of
shape ``(m, n)`` for ``m`` simultaneous integrands.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureSpec",
    "QuadratureError",
    "QuadResult",
    "gauss_kronrod_rule",
    "integrate",
    "integrate_semi_infinite",
    "integrate_geometric",
]

_EPS = np.finfo(float).eps


class QuadratureError(RuntimeError):
    """Adaptive refinement ran out of panels before reaching tolerance."""

    def __init__(self, message, value, error, panels):
        super().__init__(message)
        self.value = value
        self.error = error
        self.panels = panels


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-13
    rel_tol: float = 1e-13
    max_subdivisions: int = 4000
    # fraction of abs_tol granted to an analytic tail bound beyond the cutoff
    tail_fraction: float = 0.1

    def __post_init__(self):
        if not self.abs_tol >= 1e-14 and self.abs_tol != 0.0:
            raise ValueError("abs_tol must be >= 1e-14")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be nonnegative")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be positive")


@dataclass(frozen=True)
class QuadResult:
    value: float | np.ndarray
    error: float
    panels: int
    evaluations: int


def _legendre_coeffs(n):
    """Exact monomial coefficients (low to high) of the Legendre polynomial."""
    p0, p1 = [Fraction(1)], [Fraction(0), Fraction(1)]
    if n == 0:
        return p0
    for m in range(1, n):
        nxt = [Fraction(0)] * (m + 2)
        for i, c in enumerate(p1):
            nxt[i + 1] += Fraction(2 * m + 1, m + 1) * c
        for i, c in enumerate(p0):
            nxt[i] -= Fraction(m, m + 1) * c
        p0, p1 = p1, nxt
    return p1


def _poly_eval(coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _solve_exact(mat, rhs):
    n = len(rhs)
    a = [row[:] + [r] for row, r in zip(mat, rhs)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col] / a[col][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] / a[i][i] for i in range(n)]


@lru_cache(maxsize=None)
def gauss_kronrod_rule(n: int = 10):
    """Return (nodes, kronrod_weights, gauss_weights) on [-1, 1].

    ``gauss_weights`` is aligned with ``nodes`` and is zero at the Kronrod-only
    abscissae.  Only even ``n`` is supported.
    """
    if n % 2:
        raise ValueError("only even Gauss orders are supported")
    leg = _legendre_coeffs(n)

    def moment(m):
        return Fraction(2, m + 1) if m % 2 == 0 else Fraction(0)

    def inner_with_leg(k):
        return sum(c * moment(i + k) for i, c in enumerate(leg))

    # extension polynomial E(x) = x^(n+1) + sum_{odd i<n+1} e_i x^i, odd in x
    odd = list(range(1, n + 1, 2))
    rows, rhs = [], []
    for j in range(1, n + 1, 2):
        rows.append([inner_with_leg(i + j) for i in odd])
        rhs.append(-inner_with_leg(n + 1 + j))
    sol = _solve_exact(rows, rhs)
    ext = [Fraction(0)] * (n + 2)
    ext[n + 1] = Fraction(1)
    for i, c in zip(odd, sol):
        ext[i] = c
    # roots of E(x)/x as a polynomial in w = x^2
    q = [ext[2 * i + 1] for i in range(n // 2 + 1)]
    w_roots = np.roots([float(c) for c in reversed(q)])
    dq = [i * c for i, c in enumerate(q)][1:]
    kron_pos = []
    for w in sorted(float(r.real) for r in w_roots):
        wf = Fraction(w)
        for _ in range(4):
            wf -= _poly_eval(q, wf) / _poly_eval(dq, wf)
            wf = wf.limit_denominator(10**60)
        kron_pos.append(math.sqrt(float(wf)))
    gauss_nodes, gauss_w = np.polynomial.legendre.leggauss(n)
    nodes = np.sort(np.concatenate([gauss_nodes, [0.0], kron_pos, [-x for x in kron_pos]]))
    # weights: exact on Legendre polynomials of degree 0..2n
    deg = len(nodes)
    vander = np.polynomial.legendre.legvander(nodes, deg - 1).T
    rhs_w = np.zeros(deg)
    rhs_w[0] = 2.0
    kw = np.linalg.solve(vander, rhs_w)
    kw = 0.5 * (kw + kw[::-1])
    nodes = 0.5 * (nodes - nodes[::-1])
    gw = np.zeros(deg)
    for x, w in zip(gauss_nodes, gauss_w):
        gw[np.argmin(np.abs(nodes - x))] = w
    gw = 0.5 * (gw + gw[::-1])
    for arr in (nodes, kw, gw):
        arr.setflags(write=False)
    return nodes, kw, gw


def _panel(f, a, b, nodes, kw, gw):
    """Kronrod value, truncation estimate |K - G| and a rounding floor."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid + half * nodes
    y = np.asarray(f(x), dtype=float)
    k = half * (y @ kw)
    g = half * (y @ gw)
    floor = 50 * _EPS * float(np.max(half * (np.abs(y) @ kw)))
    return k, float(np.max(np.abs(k - g))), floor


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    spec: QuadratureSpec | None = None,
    breakpoints=(),
    raise_on_failure: bool = True,
) -> QuadResult:
    """Globally adaptive integration of a vectorised integrand over [a, b]."""
    spec = spec or QuadratureSpec()
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("finite limits required; use integrate_semi_infinite")
    if a == b:
        return QuadResult(0.0, 0.0, 0, 0)
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    nodes, kw, gw = gauss_kronrod_rule()
    cuts = [a] + sorted(c for c in breakpoints if a < c < b) + [b]
    heap = []
    total = None
    tie = 0
    # heap entries: (-truncation, tie, lo, hi, value, panel error)
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        v, tr, fl = _panel(f, lo, hi, nodes, kw, gw)
        heapq.heappush(heap, (-tr, tie, lo, hi, v, max(tr, fl)))
        tie += 1
    evals = len(heap) * len(nodes)

    def totals():
        vals = [item[4] for item in heap]
        if np.ndim(vals[0]) == 0:
            val = math.fsum(vals)
        else:
            val = np.array([math.fsum(c) for c in np.asarray(vals).T])
        return val, math.fsum(item[5] for item in heap)

    total, err = totals()
    while True:
        target = max(spec.abs_tol, spec.rel_tol * float(np.max(np.abs(total))))
        if err <= target:
            total, err = totals()
            if err <= target:
                break
        worst = heap[0]
        if -worst[0] < worst[5]:
            # every panel is at its rounding floor; nothing left to refine
            total, err = totals()
            break
        if len(heap) >= spec.max_subdivisions:
            total, err = totals()
            if raise_on_failure:
                raise QuadratureError(
                    f"no convergence on [{a}, {b}]: error {err:.3e} > {target:.3e} "
                    f"after {len(heap)} panels",
                    sign * total,
                    err,
                    len(heap),
                )
            break
        _, _, lo, hi, old, old_err = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            heapq.heappush(heap, (0.0, tie, lo, hi, old, old_err))
            total, err = totals()
            if raise_on_failure:
                raise QuadratureError("panel width underflow", sign * total, err, len(heap))
            break
        total = total - old
        err -= old_err
        for l2, h2 in ((lo, mid), (mid, hi)):
            v, tr, fl = _panel(f, l2, h2, nodes, kw, gw)
            e = max(tr, fl)
            heapq.heappush(heap, (-tr, tie, l2, h2, v, e))
            tie += 1
            total = total + v
            err += e
        evals += 2 * len(nodes)
    return QuadResult(sign * total, err, len(heap), evals)


def integrate_semi_infinite(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    tail_bound: Callable[[float], float],
    spec: QuadratureSpec | None = None,
    start: float = 1.0,
    breakpoints=(),
) -> QuadResult:
    """Integrate over [a, inf) by cutting at T with an analytic tail bound.

    ``tail_bound(T)`` must bound |integral over [T, inf)|.  T is doubled from
    ``a + start`` until the bound falls below ``tail_fraction * abs_tol``; the
    bound is added to the reported error.
    """
    spec = spec or QuadratureSpec()
    budget = spec.tail_fraction * spec.abs_tol
    cut = a + start
    while tail_bound(cut) > budget:
        cut = a + 2 * (cut - a)
        if cut - a > 1e8:
            raise QuadratureError("tail bound never became small", float("nan"), float("inf"), 0)
    res = integrate(f, a, cut, spec, breakpoints=breakpoints)
    return QuadResult(res.value, res.error + tail_bound(cut), res.panels, res.evaluations)


def integrate_geometric(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    first: float,
    spec: QuadratureSpec | None = None,
    ratio: float = 2.0,
    max_blocks: int = 60,
    quiet_blocks: int = 2,
) -> QuadResult:
    """Integrate over [a, inf) in geometrically growing blocks.

    Intended for smooth integrands with algebraic decay.  Blocks
    [a + first*ratio^(m-1)... ] are added until ``quiet_blocks`` consecutive
    blocks each contribute less than a tenth of the tolerance; the last
    block's magnitude is added to the error as a remainder estimate.
    """
    spec = spec or QuadratureSpec()
    lo, width = a, first
    parts, err, panels, evals = [], 0.0, 0, 0
    quiet = 0
    for _ in range(max_blocks):
        hi = lo + width
        res = integrate(f, lo, hi, spec)
        parts.append(res.value)
        err += res.error
        panels += res.panels
        evals += res.evaluations
        mag = float(np.max(np.abs(res.value)))
        quiet = quiet + 1 if mag < 0.1 * spec.abs_tol else 0
        if quiet >= quiet_blocks:
            err += mag
            break
        lo, width = hi, width * ratio
    else:
        raise QuadratureError("geometric blocks did not decay", sum(parts), err, panels)
    if np.ndim(parts[0]) == 0:
        value = math.fsum(parts)
    else:
        value = np.array([math.fsum(c) for c in np.asarray(parts).T])
    return QuadResult(value, err, panels, evals)
