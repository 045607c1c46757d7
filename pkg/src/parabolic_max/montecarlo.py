"""Monte Carlo oracle for N = max_{t>=0} (W(t) - t^2/2) and M = max(N, N').

Paths are refined lazily: W(T) is drawn first and the grid is filled by
Brownian-bridge bisection, skipping any interval whose chance of holding a
new maximum is below exp(-prune).  Each path yields three maxima: over the
fine grid (step h), over the coarse grid (step coarsen*h) and a continuous
maximum (an exact bridge-maximum draw on every surviving fine interval).
Grid maxima are biased low by O(sqrt h); 2 X_h - X_{4h} removes that term.

Random numbers come from a counter-based generator keyed by the seed, so a
path depends only on (seed, stream, path index) and results never depend on
how the work is split across threads.
"""

from __future__ import annotations

import math
import os
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from ._pykernels import _mix
from .series import MomentSet

__all__ = [
    "McConfig",
    "McEstimate",
    "PathMaxima",
    "simulate",
    "sample_N",
    "sample_M",
    "estimate",
    "extrapolated_mean",
    "extrapolated_variance",
    "mc_moments",
    "horizon_bound",
    "dkw_epsilon",
    "dkw_check",
    "ks_two_sample",
    "default_workers",
]

THREADS_ENV = "PARABOLIC_MAX_THREADS"
CHUNK = 1 << 14  # paths per work unit
REDUCE_CHUNK = 1 << 16  # samples per partial sum in estimate()
_M64 = (1 << 64) - 1


def default_workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be a positive integer") from None
    return os.cpu_count() or 1


@dataclass(frozen=True)
class McConfig:
    T: float = 4.0
    h: float = 1e-4
    n: int = 10**6
    seed: int = 0
    antithetic: bool = False
    coarsen: int = 4
    prune: float = 25.0
    workers: int | None = None

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T >= 3.0):
            raise ValueError("horizon T must be at least 3")
        if not (math.isfinite(self.h) and 0.0 < self.h <= 1e-3):
            raise ValueError("step h must lie in (0, 1e-3]")
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 10**4:
            raise ValueError("n must be an integer >= 10^4")
        if not (0 <= self.seed <= _M64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.coarsen < 1 or self.coarsen & (self.coarsen - 1):
            raise ValueError("coarsen must be a power of two")
        if self.prune < 10.0:
            raise ValueError("prune below 10 discards maxima too often")
        if self.workers is not None and self.workers < 1:
            raise ValueError("workers must be positive")

    @property
    def steps(self) -> int:
        # grid points t_i = i h <= T
        return int(math.floor(self.T / self.h * (1.0 + 1e-12)))

    def key(self, stream: int = 0) -> int:
        return _mix((self.seed + stream * 0x9E3779B97F4A7C15) & _M64)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n_effective: int


@dataclass(frozen=True)
class PathMaxima:
    fine: np.ndarray
    coarse: np.ndarray
    continuous: np.ndarray

    def __len__(self):
        return len(self.fine)

    def pair_max(self) -> PathMaxima:
        """Maxima of two independent draws: paths (4i, 4i+2) and (4i+1, 4i+3).

        The layout keeps both members of a maximum independent while an
        antithetic run still yields antithetic consecutive outputs.
        """
        n = len(self) // 4 * 4

        def combine(x):
            x = x[:n].reshape(-1, 4)
            return np.maximum(x[:, :2], x[:, 2:]).reshape(-1)

        return PathMaxima(combine(self.fine), combine(self.coarse), combine(self.continuous))


def simulate(cfg: McConfig, count: int | None = None, gamma: float = 0.5, stream: int = 0) -> PathMaxima:
    """Maxima of ``count`` paths of W(t) - gamma t^2 on [0, T]."""
    count = cfg.n if count is None else int(count)
    if count < 1:
        raise ValueError("count must be positive")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    key = cfg.key(stream)
    out = np.empty((count, 3))
    starts = range(0, count, CHUNK)

    def work(start):
        stop = min(start + CHUNK, count)
        out[start:stop] = kernels.sample_paths(
            key, start, stop - start, cfg.steps, cfg.h, gamma, cfg.coarsen, cfg.prune, cfg.antithetic
        )

    workers = cfg.workers or default_workers()
    if workers == 1 or count <= CHUNK:
        for s in starts:
            work(s)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, starts))
    return PathMaxima(out[:, 0].copy(), out[:, 1].copy(), out[:, 2].copy())


def sample_N(cfg: McConfig) -> np.ndarray:
    """Grid maxima over t_i = i h <= T of W(t_i) - t_i^2 / 2 (n samples)."""
    return simulate(cfg).fine


def sample_M(cfg: McConfig) -> np.ndarray:
    """Maxima of two independent grid draws of N (n samples)."""
    need = -(-2 * cfg.n // 4) * 4
    return simulate(cfg, need).pair_max().fine[: cfg.n]


# ---------------------------------------------------------------- statistics


def _chunks(stream):
    if isinstance(stream, np.ndarray):
        yield stream.reshape(-1)
        return
    for part in stream:
        yield np.asarray(part, dtype=float).reshape(-1)


def estimate(stream, n: int | None = None) -> McEstimate:
    """Mean and standard error of a sample stream.

    ``stream`` is an array or an iterable of arrays.  Partial sums are taken
    over fixed blocks of the concatenated stream and merged in order, so the
    result depends only on the sample sequence.
    """
    count = 0
    mean = 0.0
    m2 = 0.0
    buf = np.empty(0)
    left = math.inf if n is None else int(n)

    def merge(block):
        nonlocal count, mean, m2
        k = len(block)
        bm = float(np.mean(block))
        bm2 = float(np.sum((block - bm) ** 2))
        tot = count + k
        delta = bm - mean
        mean += delta * k / tot
        m2 += bm2 + delta * delta * count * k / tot
        count = tot

    for part in _chunks(stream):
        if left <= 0:
            break
        if len(part) > left:
            part = part[: int(left)]
        left -= len(part)
        buf = np.concatenate([buf, part]) if len(buf) else part
        while len(buf) >= REDUCE_CHUNK:
            merge(buf[:REDUCE_CHUNK])
            buf = buf[REDUCE_CHUNK:]
    if len(buf):
        merge(buf)
    if count < 2:
        raise ValueError("need at least two samples")
    var = m2 / (count - 1)
    return McEstimate(mean, math.sqrt(var / count), count)


def _pair_average(x, antithetic):
    if not antithetic:
        return x
    n = len(x) // 2 * 2
    return 0.5 * (x[0:n:2] + x[1:n:2])


def extrapolated_mean(maxima: PathMaxima, coarsen: int = 4, antithetic: bool = False) -> McEstimate:
    """Mean with the sqrt(h) bias term removed, from fine and coarse maxima
    of the same paths (coarse step = coarsen * h)."""
    r = math.sqrt(coarsen)
    y = (r * maxima.fine - maxima.coarse) / (r - 1.0)
    return estimate(_pair_average(y, antithetic))


def extrapolated_variance(maxima: PathMaxima, coarsen: int = 4, antithetic: bool = False):
    """(variance, stderr) from extrapolated first and second moments.

    The standard error follows from the delta method on the per-sample pair
    (y1, y2) of extrapolated first and second powers.
    """
    r = math.sqrt(coarsen)
    y1 = (r * maxima.fine - maxima.coarse) / (r - 1.0)
    y2 = (r * maxima.fine**2 - maxima.coarse**2) / (r - 1.0)
    y1 = _pair_average(y1, antithetic)
    y2 = _pair_average(y2, antithetic)
    m1 = float(np.mean(y1))
    m2 = float(np.mean(y2))
    # influence function of m2 - m1^2
    z = y2 - 2.0 * m1 * y1
    se = float(np.std(z, ddof=1) / math.sqrt(len(z)))
    return m2 - m1 * m1, se


def mc_moments(cfg: McConfig) -> MomentSet:
    """Extrapolated moments from cfg.n draws of N and cfg.n of M; the error
    entries are standard errors."""
    sims = simulate(cfg, -(-2 * cfg.n // 4) * 4)
    pair = sims.pair_max()
    out = {}
    for label, maxima in (("n", sims), ("m", pair)):
        m = extrapolated_mean(maxima, cfg.coarsen, cfg.antithetic)
        v, v_se = extrapolated_variance(maxima, cfg.coarsen, cfg.antithetic)
        r = math.sqrt(cfg.coarsen)
        sq = estimate(_pair_average((r * maxima.fine**2 - maxima.coarse**2) / (r - 1.0), cfg.antithetic))
        out[label] = (m, sq, v, v_se)
    (mn, sn, vn, vn_se), (mm, sm, vm, vm_se) = out["n"], out["m"]
    err = {"en": mn.stderr, "em": mm.stderr, "en2": sn.stderr, "em2": sm.stderr, "var_n": vn_se, "var_m": vm_se}
    return MomentSet(mn.mean, mm.mean, sn.mean, sm.mean, vn, vm, err)


def horizon_bound(T: float, gamma: float = 0.5) -> float:
    """Upper bound on P(sup_{t >= T} W(t) - gamma t^2 >= 0).

    Beyond T the drift lies below its tangent line at T; for W(T) = w the
    linear-boundary crossing probability is exp(-4 gamma T (gamma T^2 - w)).
    Averaging over w gives
    Phi^c(gamma T^1.5) + exp(4 gamma^2 T^3) Phi^c(3 gamma T^1.5).
    """
    a = gamma * T**1.5
    first = 0.5 * math.erfc(a / math.sqrt(2.0))
    z = 3.0 * a
    # log of the normal upper tail, asymptotic form once erfc underflows
    tail = 0.5 * math.erfc(z / math.sqrt(2.0))
    if tail > 0.0:
        log_tail = math.log(tail)
    else:
        log_tail = -0.5 * z * z - math.log(z * math.sqrt(2.0 * math.pi))
    second = math.exp(4.0 * gamma * gamma * T**3 + log_tail)
    return first + second


def dkw_epsilon(n: int, alpha: float = 0.01) -> float:
    """Half-width of the (1 - alpha) Dvoretzky-Kiefer-Wolfowitz band."""
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))


def dkw_check(samples, cdf, lo: float, hi: float, alpha: float = 0.01):
    """sup over [lo, hi] of |ECDF - cdf| versus the DKW band.

    ``cdf`` must be vectorised.  Returns (distance, epsilon, passed).
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = len(x)
    lo_i = int(np.searchsorted(x, lo, side="left"))
    hi_i = int(np.searchsorted(x, hi, side="right"))
    inside = x[lo_i:hi_i]
    F = np.asarray(cdf(inside), dtype=float)
    ranks = np.arange(lo_i + 1, hi_i + 1)
    upper = np.max(ranks / n - F) if len(inside) else 0.0
    lower = np.max(F - (ranks - 1) / n) if len(inside) else 0.0
    ends = np.asarray(cdf(np.array([lo, hi])), dtype=float)
    # at the ends the ECDF is flat between the neighbouring samples
    edge = max(abs(lo_i / n - ends[0]), abs(hi_i / n - ends[1]))
    dist = float(max(upper, lower, edge))
    eps = dkw_epsilon(n, alpha)
    return dist, eps, dist <= eps


def _kolmogorov_sf(lam):
    if lam < 0.2:
        return 1.0
    total = 0.0
    for k in range(1, 101):
        term = 2.0 * (-1) ** (k - 1) * math.exp(-2.0 * k * k * lam * lam)
        total += term
        if abs(term) < 1e-16:
            break
    return min(max(total, 0.0), 1.0)


def ks_two_sample(a, b):
    """Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    na, nb = len(a), len(b)
    both = np.concatenate([a, b])
    fa = np.searchsorted(a, both, side="right") / na
    fb = np.searchsorted(b, both, side="right") / nb
    d = float(np.max(np.abs(fa - fb)))
    en = math.sqrt(na * nb / (na + nb))
    return d, _kolmogorov_sf((en + 0.12 + 0.11 / en) * d)


def scaled_side(samples: Iterable[float], gamma: float) -> np.ndarray:
    """Map gamma-drift maxima to the gamma = 1/2 scale: multiply by (2 gamma)^(1/3)."""
    return np.asarray(samples, dtype=float) * (2.0 * gamma) ** (1.0 / 3.0)
