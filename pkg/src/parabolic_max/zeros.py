"""Zeros of Ai with the quantities the series need at each zero.

Zeros are seeded from the large-k expansion of the k-th zero and polished by
Newton's method; a bisection fallback takes over if an iterate leaves its
bracket.  Records are cached in memory per process.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .airy import DomainError, airy
from .scorer import ASYMPTOTIC_FROM, phi_weight, scorer_hi

__all__ = ["ZeroRecord", "ZeroTable", "airy_zero", "zero_table", "zero_seed", "MAX_INDEX"]

MAX_INDEX = 10**6
# the table is always built a few entries past the request so that finite
# differences around the last summed index have neighbours
PADDING = 8


@dataclass(frozen=True)
class ZeroRecord:
    k: int
    a_k: float
    aip: float
    bi: float
    hi: float
    gi: float
    phi: float


@dataclass(frozen=True)
class ZeroTable:
    """Columns for k = 1..len; ``a[k-1]`` is the k-th zero."""

    a: np.ndarray
    aip: np.ndarray
    bi: np.ndarray
    hi: np.ndarray
    gi: np.ndarray
    phi: np.ndarray

    def __len__(self):
        return len(self.a)

    @property
    def k(self):
        return np.arange(1, len(self.a) + 1)

    def head(self, n):
        return ZeroTable(*(getattr(self, f)[:n] for f in ("a", "aip", "bi", "hi", "gi", "phi")))

    def record(self, k):
        i = k - 1
        return ZeroRecord(
            k,
            float(self.a[i]),
            float(self.aip[i]),
            float(self.bi[i]),
            float(self.hi[i]),
            float(self.gi[i]),
            float(self.phi[i]),
        )


def zero_seed(k):
    """Large-k expansion of a_k (first five terms); accurate to ~1e-5 at k = 1."""
    k = np.asarray(k, dtype=float)
    t = 3.0 * math.pi * (4.0 * k - 1.0) / 8.0
    t2 = t ** -2
    corr = 1 + t2 * (5 / 48 + t2 * (-5 / 36 + t2 * (77125 / 82944 + t2 * (-108056875 / 6967296))))
    return -(t ** (2.0 / 3.0)) * corr


def _bisect(k, lo, hi):
    flo = airy(lo)[0]
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = airy(mid)[0]
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _solve(ks):
    a = zero_seed(ks)
    # zeros are about pi / sqrt|a| apart; bracket by a third of that
    half = np.pi / np.sqrt(-a) / 3.0
    lo, hi = a - half, a + half
    done = np.zeros(a.shape, dtype=bool)
    bad = np.zeros(a.shape, dtype=bool)
    for _ in range(12):
        todo = ~(done | bad)
        if not todo.any():
            break
        f, fp, _, _ = airy(a[todo])
        step = f / fp
        new = a[todo] - step
        out = (new < lo[todo]) | (new > hi[todo])
        conv = np.abs(step) <= 2.0 * np.finfo(float).eps * np.abs(new)
        idx = np.flatnonzero(todo)
        a[idx[~out]] = new[~out]
        done[idx[conv & ~out]] = True
        bad[idx[out]] = True
    bad |= ~done
    for i in np.flatnonzero(bad):
        a[i] = _bisect(int(ks[i]), float(lo[i]), float(hi[i]))
    return a


def _build(k_first, k_last):
    ks = np.arange(k_first, k_last + 1)
    a = _solve(ks)
    _, aip, bi, _ = airy(a)
    phi = phi_weight(a)
    hi = np.empty_like(a)
    far = a <= -ASYMPTOTIC_FROM
    # pi Hi(a) = phi(a) - 1/a exactly; no cancellation since phi << 1/|a|
    hi[far] = (phi[far] - 1.0 / a[far]) / math.pi
    hi[~far] = scorer_hi(a[~far])
    return a, aip, bi, hi, phi


_lock = threading.Lock()
_cache: ZeroTable | None = None


def zero_table(count: int) -> ZeroTable:
    """ZeroTable for k = 1..count (the cached table may be longer)."""
    global _cache
    if count < 1:
        raise DomainError("count must be positive")
    if count > MAX_INDEX + PADDING:
        raise DomainError(f"zeros are supported up to k = {MAX_INDEX}")
    table = _cache
    if table is not None and len(table) >= count:
        return table.head(count)
    with _lock:
        table = _cache
        have = 0 if table is None else len(table)
        if have < count:
            want = min(max(count, 2 * have, 1024), MAX_INDEX + PADDING)
            a, aip, bi, hi, phi = _build(have + 1, want)
            if table is not None:
                a = np.concatenate([table.a, a])
                aip = np.concatenate([table.aip, aip])
                bi = np.concatenate([table.bi, bi])
                hi = np.concatenate([table.hi, hi])
                phi = np.concatenate([table.phi, phi])
            cols = [a, aip, bi, hi, bi - hi, phi]
            for c in cols:
                c.setflags(write=False)
            table = ZeroTable(*cols)
            _cache = table
    return table.head(count)


def airy_zero(k: int) -> ZeroRecord:
    """The k-th zero of Ai (k = 1, 2, ...) with cached companion values."""
    if isinstance(k, bool) or int(k) != k:
        raise DomainError("k must be an integer")
    k = int(k)
    if k < 1:
        raise DomainError("k must be a positive integer")
    if k > MAX_INDEX:
        raise DomainError(f"zeros are supported up to k = {MAX_INDEX}")
    return zero_table(k).record(k)
