"""Airy-zero series for the law of N = max_{t>=0} (W(t) - t^2/2) and of the
two-sided maximum M.

Every series is summed directly for k below the cutoff K and, with
``tail_mode="asymptotic"``, completed by the Euler-Maclaurin tails of
:mod:`parabolic_max.asymptotics`.  With ``tail_mode="none"`` the sums stop
at k = K and the omitted remainder only enters the error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import asymptotics as asy
from .airy import AI0, AIP0, DomainError, airy
from .quadrature import QuadratureSpec, integrate
from .zeros import PADDING, zero_table

__all__ = [
    "SeriesConfig",
    "MomentSet",
    "EvalPoint",
    "SeriesValues",
    "tail_probability_G",
    "density_fN",
    "density_fM",
    "evaluate",
    "series_G",
    "series_fN",
    "moments",
    "mean_via_tmean",
    "tmean_partial_sums",
    "tmean_with_error",
    "moment_cross_check",
    "hitting_density",
    "hitting_density_values",
    "hitting_cumulative",
    "hitting_laplace",
    "hitting_mass",
    "gparseval_check",
    "g_integrals",
    "CLAMP_TOL",
]

CBRT2 = 2.0 ** (1.0 / 3.0)
LOG_DERIV_0 = AIP0 / AI0
CLAMP_TOL = 1e-12
ASYMPTOTIC_MIN_K = 200
DOUBLE_SUM_CAP = 4000
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SeriesConfig:
    """Cutoff K and tail handling.

    ``pairing`` groups alternating terms as (2j, 2j+1); it is built into the
    asymptotic tails and, under plain truncation, makes alternating sums stop
    after a complete pair.
    """

    K: int = 200
    tail_mode: str = "asymptotic"
    pairing: bool = True
    compensated_summation: bool = True

    def __post_init__(self):
        if isinstance(self.K, bool) or int(self.K) != self.K:
            raise ValueError("K must be an integer")
        if self.K < 2:
            raise ValueError("K must be at least 2")
        if self.tail_mode not in ("none", "asymptotic"):
            raise ValueError("tail_mode must be 'none' or 'asymptotic'")
        if self.tail_mode == "asymptotic" and self.K < ASYMPTOTIC_MIN_K:
            raise ValueError(f"asymptotic tails need K >= {ASYMPTOTIC_MIN_K}")
        if self.tail_mode == "asymptotic" and not self.pairing:
            raise ValueError("asymptotic tails always pair alternating terms; use pairing=True")

    @property
    def asymptotic(self) -> bool:
        return self.tail_mode == "asymptotic"

    @property
    def n_direct(self) -> int:
        """Number of leading terms summed explicitly."""
        return self.K - 1 if self.asymptotic else self.K

    @classmethod
    def auto(cls, K: int = 200, **kw):
        """Asymptotic tails when K allows them, plain truncation otherwise."""
        mode = "asymptotic" if K >= ASYMPTOTIC_MIN_K else "none"
        return cls(K=K, tail_mode=mode, **kw)


@dataclass(frozen=True)
class MomentSet:
    en: float
    em: float
    en2: float
    em2: float
    var_n: float
    var_m: float
    err_est: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "en": self.en,
            "em": self.em,
            "en2": self.en2,
            "em2": self.em2,
            "var_n": self.var_n,
            "var_m": self.var_m,
        }


@dataclass(frozen=True)
class EvalPoint:
    x: float
    g: float
    f_n: float
    f_m: float

    @property
    def cdf_n(self) -> float:
        return 1.0 - self.g

    @property
    def cdf_m(self) -> float:
        return self.cdf_n**2

    @property
    def g_m(self) -> float:
        return 2.0 * self.g - self.g**2


@dataclass(frozen=True)
class SeriesValues:
    """Vectorised series output with diagnostics."""

    values: np.ndarray
    errors: np.ndarray
    clamped: int = 0
    out_of_tolerance: int = 0


# ---------------------------------------------------------------- helpers


def _sum(terms, compensated, axis=0):
    terms = np.asarray(terms, dtype=float)
    if not compensated:
        return np.sum(terms, axis=axis)
    moved = np.moveaxis(terms, axis, -1)
    flat = moved.reshape(-1, moved.shape[-1])
    out = np.array([math.fsum(row) for row in flat])
    return out.reshape(moved.shape[:-1]) if moved.ndim > 1 else float(out[0])


def _table(cfg):
    return zero_table(max(cfg.K, 8) + PADDING)


def _clamp(values, lo, hi):
    values = np.array(values, dtype=float)
    below = values < lo
    above = values > hi
    out_tol = int(np.count_nonzero((values < lo - CLAMP_TOL) | (values > hi + CLAMP_TOL)))
    clamped = int(np.count_nonzero(below | above))
    values[below] = lo
    values[above] = hi
    return values, clamped, out_tol


def _truncation_estimate(next_terms, k_next, power, alternating):
    """Rough size of an omitted remainder from its first terms.

    Alternating: the first omitted pair sum bounds it; otherwise a power law
    k^-power is integrated from the first omitted term.
    """
    t = np.abs(np.asarray(next_terms, dtype=float))
    if alternating:
        return 1.5 * t[0]
    return 1.5 * (t[0] + t[0] * k_next / max(power - 1.0, 0.1))


def _alternating_tail(F, y, K):
    # pairs must start on an even index; an odd K contributes one term first
    if K % 2 == 0:
        return asy.alternating_tail(F, y, K)
    value, err = asy.alternating_tail(F, y, K + 1)
    return value - np.asarray(F(y[K - 1 : K]))[..., 0], err


def _shift_limit(tab, cfg):
    # the continuation needs y - d >= 0 on the whole stencil
    return -tab.a[cfg.K - 3] - 1.0


# ------------------------------------------------------- G and densities


def _check_x(x, strict):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(x)):
        raise DomainError("x must be finite")
    if strict and np.any(x <= 0):
        raise DomainError("the density series is stated for x > 0")
    if np.any(x < 0):
        raise DomainError("x must be nonnegative")
    return x


def _direct_shifted(cfg, d, derivative):
    tab = _table(cfg)
    n = cfg.n_direct
    a = tab.a[:n, None]
    vals = airy(a + d[None, :])[1 if derivative else 0]
    terms = tab.phi[:n, None] * vals / tab.aip[:n, None]
    return _sum(terms, cfg.compensated_summation, axis=0), np.max(np.abs(terms), axis=0) * n * _EPS


def _shifted_tail(cfg, d, derivative):
    tab = _table(cfg)
    y = -tab.a
    ok = d <= _shift_limit(tab, cfg)
    value = np.zeros_like(d)
    err = np.zeros_like(d)
    if ok.any():
        dd = d[ok][:, None]
        ratio = asy.shifted_derivative_ratio if derivative else asy.shifted_ratio

        def F(yy):
            return asy.phi_smooth(yy)[None, :] * ratio(yy[None, :], dd)

        v, e = asy.smooth_tail(F, y, cfg.K)
        value[ok] = v
        err[ok] = e
    # beyond the limit every tail term carries Ai at a positive argument
    # larger than |a_K| - 1, i.e. it is below exp(-600)
    return value, err


def _truncation_shifted(cfg, d, derivative):
    tab = _table(cfg)
    k = cfg.K
    vals = airy(tab.a[k : k + 2, None] + d[None, :])[1 if derivative else 0]
    nxt = tab.phi[k : k + 2, None] * vals / tab.aip[k : k + 2, None]
    power = 8.0 / 3.0 - (1.0 / 6.0 if derivative else -1.0 / 6.0)
    return np.array(
        [_truncation_estimate(nxt[:, i], k + 1, power, alternating=False) for i in range(len(d))]
    )


def series_G(x, cfg: SeriesConfig | None = None) -> SeriesValues:
    """G(x) = P(N > x) at an array of x >= 0, with error estimates."""
    cfg = cfg or SeriesConfig()
    x = _check_x(x, strict=False)
    d = CBRT2 * x
    lead = airy(d)[0] / AI0
    direct, rnd = _direct_shifted(cfg, d, derivative=False)
    total = lead + direct
    err = rnd + 4 * _EPS
    if cfg.asymptotic:
        tail, terr = _shifted_tail(cfg, d, derivative=False)
        total = total + tail
        err = err + terr
    else:
        err = err + _truncation_shifted(cfg, d, derivative=False)
    # exact at the origin: every Ai(a_k) vanishes
    total = np.where(x == 0, 1.0, total)
    values, clamped, bad = _clamp(total, 0.0, 1.0)
    return SeriesValues(values, err, clamped, bad)


def series_fN(x, cfg: SeriesConfig | None = None, include_zero: bool = False) -> SeriesValues:
    """Density f_N at an array of x > 0.

    The sum converges uniformly on [0, inf); ``include_zero`` admits x = 0
    and returns the right limit there.
    """
    cfg = cfg or SeriesConfig()
    x = _check_x(x, strict=not include_zero)
    d = CBRT2 * x
    lead = -CBRT2 * airy(d)[1] / AI0
    direct, rnd = _direct_shifted(cfg, d, derivative=True)
    total = lead - CBRT2 * direct
    err = CBRT2 * rnd + 4 * _EPS
    if cfg.asymptotic:
        tail, terr = _shifted_tail(cfg, d, derivative=True)
        total = total - CBRT2 * tail
        err = err + CBRT2 * terr
    else:
        err = err + CBRT2 * _truncation_shifted(cfg, d, derivative=True)
    values, clamped, bad = _clamp(total, 0.0, np.inf)
    return SeriesValues(values, err, clamped, bad)


def _scalar(fn, x, cfg):
    res = fn(np.array([x], dtype=float), cfg)
    return float(res.values[0])


def tail_probability_G(x: float, cfg: SeriesConfig | None = None) -> float:
    """G(x) = P(N > x) = 1 - F_N(x) for x >= 0."""
    return _scalar(series_G, x, cfg)


def density_fN(x: float, cfg: SeriesConfig | None = None) -> float:
    """Density of N at x > 0."""
    return _scalar(series_fN, x, cfg)


def density_fM(x: float, cfg: SeriesConfig | None = None) -> float:
    """Density of M at x > 0: 2 (1 - G(x)) f_N(x)."""
    return 2.0 * (1.0 - tail_probability_G(x, cfg)) * density_fN(x, cfg)


def evaluate(x, cfg: SeriesConfig | None = None):
    """EvalPoint(s) with G, f_N and f_M sharing one pass over the zeros."""
    arr = _check_x(x, strict=True)
    g = series_G(arr, cfg).values
    fn = series_fN(arr, cfg).values
    fm = 2.0 * (1.0 - g) * fn
    pts = [EvalPoint(float(a), float(b), float(c), float(e)) for a, b, c, e in zip(arr, g, fn, fm)]
    return pts[0] if np.ndim(x) == 0 else pts


# ---------------------------------------------------------------- moments


class _Sums:
    """Direct partial sums plus tails (or truncation estimates) of the
    single series appearing in the moment formulas."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.tab = _table(cfg)
        n = cfg.n_direct
        t = self.tab
        self.a = t.a[:n]
        self.phi = t.phi[:n]
        self.bi = t.bi[:n]
        self.hi = t.hi[:n]
        self.gi = t.gi[:n]
        self.y = -t.a
        # plain truncation of an alternating sum stops after a complete pair
        # (2j, 2j+1) when pairing is on
        self.paired = cfg.pairing and not cfg.asymptotic
        self.n_alt = n - 1 if self.paired and n % 2 == 0 else n

    def direct(self, terms, alternating=False):
        terms = np.asarray(terms, dtype=float)
        if alternating:
            terms = terms[: self.n_alt]
        return _sum(terms, self.cfg.compensated_summation), len(terms) * _EPS * float(
            np.max(np.abs(terms))
        )

    def tail(self, F, alternating, next_terms, power):
        """Tail value and error; ``F`` is the smooth magnitude function."""
        if self.cfg.asymptotic:
            y = self.y
            if alternating:
                return _alternating_tail(F, y, self.cfg.K)
            return asy.smooth_tail(F, y, self.cfg.K)
        if alternating and self.paired:
            # pair sums have one sign and decay like k^-(power + 1)
            k = self.n_alt + 1
            pair = abs(float(next_terms[0] + next_terms[1]))
            return 0.0, 1.5 * (pair + pair * (k / 2) / power)
        return 0.0, _truncation_estimate(next_terms, self.cfg.K + 1, power, alternating)

    def nxt(self, name, alternating=False):
        k = self.n_alt if alternating else self.cfg.K
        t = self.tab
        a, phi, bi, hi = t.a[k : k + 2], t.phi[k : k + 2], t.bi[k : k + 2], t.hi[k : k + 2]
        return {
            "phi_bi": phi * bi,
            "phi_hi": phi * hi,
            "phi2": phi * phi,
            "a_phi_bi": a * phi * bi,
            "a_phi2": a * phi * phi,
            "phi_a3": phi / a**3,
            "phi_a2": phi / a**2,
        }[name]


def _phi_m(yy):
    return asy.phi_smooth(yy) * asy.modulus(yy)


def _single_sums(cfg):
    s = _Sums(cfg)
    phi, a, bi, hi = s.phi, s.a, s.bi, s.hi
    out = {}
    specs = {
        # name: (direct terms, smooth magnitude F(y), alternating, decay power)
        "phi_bi": (phi * bi, _phi_m, True, 17 / 6),
        "phi_hi": (phi * hi, lambda yy: asy.phi_smooth(yy) * (asy.phi_smooth(yy) + 1 / yy) / math.pi, False, 10 / 3),
        "phi2": (phi * phi, lambda yy: asy.phi_smooth(yy) ** 2, False, 16 / 3),
        "a_phi_bi": (a * phi * bi, lambda yy: -yy * _phi_m(yy), True, 13 / 6),
        "a_phi2": (a * phi * phi, lambda yy: -yy * asy.phi_smooth(yy) ** 2, False, 14 / 3),
        "phi_a3": (phi / a**3, lambda yy: -asy.phi_smooth(yy) / yy**3, False, 14 / 3),
        "phi_a2": (phi / a**2, lambda yy: asy.phi_smooth(yy) / yy**2, False, 4.0),
    }
    for name, (terms, F, alternating, power) in specs.items():
        dv, de = s.direct(terms, alternating)
        tv, te = s.tail(F, alternating, s.nxt(name, alternating), power)
        out[name] = (dv + float(tv), de + float(te))
    # the Gi forms are summed separately as a cross-check of the Bi - Hi split
    dv, de = s.direct(phi * s.gi)
    out["phi_gi_direct"] = dv
    dv, de = s.direct(phi * (math.pi * a * s.gi - 1.0))
    out["phi_agi_direct"] = dv
    return s, out


def _double_sum(s):
    """Sum over k of sum over j < k of phi_k phi_j / (a_k - a_j)^2.

    Summed exactly up to min(n, DOUBLE_SUM_CAP); beyond the cap the inner
    sum is replaced by its first-order form (sum of all phi_j) / a_k^2.
    """
    cfg = s.cfg
    tab = s.tab
    full = cfg.asymptotic or cfg.K > DOUBLE_SUM_CAP
    n = DOUBLE_SUM_CAP if full else cfg.K
    extra = zero_table(n + PADDING) if n + PADDING > len(tab) else tab
    a = extra.a[:n]
    phi = extra.phi[:n]
    inner = np.zeros(n)
    for k in range(1, n):
        diff = a[k] - a[:k]
        inner[k] = _sum(phi[:k] / (diff * diff), cfg.compensated_summation)
    value = _sum(phi * inner, cfg.compensated_summation)
    err = n * _EPS * float(np.max(np.abs(phi * inner))) if n > 1 else 0.0
    phi_total = float(np.sum(phi))
    if full:
        y = -extra.a

        def F(yy):
            return asy.phi_smooth(yy) * phi_total / yy**2

        rem, rem_err = asy.smooth_tail(F, y, n)
        # first-order remainder: its own size is the error allowance
        value += float(rem)
        err += abs(float(rem)) + float(rem_err)
    else:
        k = cfg.K
        nxt = tab.phi[k] * phi_total / tab.a[k] ** 2
        err += _truncation_estimate([nxt], k + 1, 4.0, alternating=False)
    return value, err


def moments(cfg: SeriesConfig | None = None) -> MomentSet:
    """First and second moments of N and M from the Airy-zero series."""
    cfg = cfg or SeriesConfig()
    s, sums = _single_sums(cfg)

    def v(name):
        return sums[name][0]

    def e(name):
        return sums[name][1]

    pi = math.pi
    en = 1.0 / (CBRT2 * 3.0 * AI0) - pi / CBRT2 * (v("phi_bi") - v("phi_hi"))
    en_err = pi / CBRT2 * (e("phi_bi") + e("phi_hi"))
    em = (
        CBRT2**2 / (3.0 * AI0)
        - AIP0**2 / (CBRT2 * AI0**2)
        - (2 * pi * v("phi_bi") - v("phi2")) / CBRT2
    )
    em_err = (2 * pi * e("phi_bi") + e("phi2")) / CBRT2
    en2 = -CBRT2 * LOG_DERIV_0 + CBRT2 * (pi * v("a_phi_bi") - v("a_phi2"))
    en2_err = CBRT2 * (pi * e("a_phi_bi") + e("a_phi2"))
    dsum, dsum_err = _double_sum(s)
    em2 = (
        -5.0 * CBRT2 / 3.0 * LOG_DERIV_0
        + 2 ** (4 / 3)
        * (
            pi * v("a_phi_bi")
            - 2.0 / 3.0 * v("a_phi2")
            + 2.0 * v("phi_a3")
            + 2.0 * LOG_DERIV_0 * v("phi_a2")
        )
        + 2 ** (7 / 3) * dsum
    )
    em2_err = 2 ** (4 / 3) * (
        pi * e("a_phi_bi") + 2 / 3 * e("a_phi2") + 2 * e("phi_a3") + 2 * abs(LOG_DERIV_0) * e("phi_a2")
    ) + 2 ** (7 / 3) * dsum_err
    var_n = en2 - en * en
    var_m = em2 - em * em
    rnd = 1e-14
    err = {
        "en": en_err + rnd,
        "em": em_err + rnd,
        "en2": en2_err + rnd,
        "em2": em2_err + rnd,
        "var_n": en2_err + 2 * en * en_err + rnd,
        "var_m": em2_err + 2 * em * em_err + rnd,
    }
    return MomentSet(en, em, en2, em2, var_n, var_m, err)


def moment_cross_check(cfg: SeriesConfig | None = None):
    """(E N, E N^2) from the Gi-form and from the Bi - Hi form (direct parts).

    The two forms are algebraically identical term by term; their gap
    measures rounding in the zero data only.
    """
    cfg = cfg or SeriesConfig()
    _, sums = _single_sums(cfg)
    gi_form = (sums["phi_gi_direct"], sums["phi_agi_direct"])
    n = cfg.n_direct
    tab = _table(cfg)
    phi, bi, hi, a = tab.phi[:n], tab.bi[:n], tab.hi[:n], tab.a[:n]
    split = (
        _sum(phi * bi - phi * hi, cfg.compensated_summation),
        _sum(math.pi * a * phi * bi - a * phi * phi, cfg.compensated_summation),
    )
    return gi_form, split


# ------------------------------------------------------- conditional sums


# Hi(a_k)^2 ~ 1/(pi y)^2 against a zero density ~ sqrt(y)/pi: split off y^-1.5/pi^3
_HI2_LEAD = (lambda y: y**-1.5 / math.pi**3, lambda Y: 2.0 / (math.pi**3 * math.sqrt(Y)))


def tmean_partial_sums(count: int, paired: bool):
    """Partial sums of pi^2 2^(-1/3) sum Hi(a_k)(Hi(a_k) - c Bi(a_k)) for c = 1, 2.

    Returns an array of shape (count, 2); with ``paired`` the k-th row holds
    the sum up to the end of the pair containing k (k = 1 stands alone and
    pairs are (2, 3), (4, 5), ...).
    """
    tab = zero_table(count + PADDING)
    hi, bi = tab.hi[: count + 1], tab.bi[: count + 1]
    scale = math.pi**2 / CBRT2
    out = np.empty((count, 2))
    for col, c in enumerate((1.0, 2.0)):
        terms = scale * hi * (hi - c * bi)
        partial = np.cumsum(terms)
        if paired:
            idx = np.arange(count)
            # pairs (2j, 2j+1) are 0-based indices (2j-1, 2j); end of pair is even index
            end = np.where(idx % 2 == 1, idx + 1, idx)
            partial = partial[end]
        out[:, col] = partial[:count]
    return out


def mean_via_tmean(cfg: SeriesConfig | None = None):
    """(E N, E M) from the conditionally convergent Scorer-function sums.

    Consecutive terms are always grouped in pairs.  See
    :func:`tmean_with_error` for the error estimates.
    """
    (en, em), _ = tmean_with_error(cfg)
    return en, em


def tmean_with_error(cfg: SeriesConfig | None = None):
    cfg = cfg or SeriesConfig()
    tab = _table(cfg)
    n = cfg.n_direct
    if n % 2 == 0:
        n -= 1  # end on a complete pair: k = 1, (2,3), ..., (n-1, n)
    hi, bi = tab.hi[:n], tab.bi[:n]
    scale = math.pi**2 / CBRT2
    hi2 = _sum(hi * hi, cfg.compensated_summation)
    pairs = np.concatenate([[hi[0] * bi[0]], (hi[1::2] * bi[1::2] + hi[2::2] * bi[2::2])])
    hibi = _sum(pairs, cfg.compensated_summation)
    start = n + 1  # first omitted index, even
    y = -tab.a

    def hi_smooth(yy):
        return (asy.phi_smooth(yy) + 1.0 / yy) / math.pi

    if cfg.asymptotic:
        t1, e1 = asy.smooth_tail(lambda yy: hi_smooth(yy) ** 2, y, start, leading=_HI2_LEAD)
        t2, e2 = asy.alternating_tail(lambda yy: hi_smooth(yy) * asy.modulus(yy), y, start)
        hi2 += float(t1)
        hibi += float(t2)
        err1, err2 = float(e1), float(e2)
    else:
        k = start
        nxt_hi2 = tab.hi[k - 1 : k + 1] ** 2
        nxt_pair = tab.hi[k - 1] * tab.bi[k - 1] + tab.hi[k] * tab.bi[k]
        err1 = _truncation_estimate(nxt_hi2, k, 4.0 / 3.0, alternating=False)
        err2 = _truncation_estimate([nxt_pair], k, 11.0 / 6.0, alternating=False)
    en = scale * (hi2 - hibi)
    em = scale * (hi2 - 2.0 * hibi)
    return (en, em), (scale * (err1 + err2), scale * (err1 + 2 * err2))


# ---------------------------------------------------------- hitting time

_INV_CBRT2 = 1.0 / CBRT2


def hitting_density_values(
    x: float, t, cfg: SeriesConfig | None = None, scaled: bool = False, include_zero: bool = False
):
    """Density of the hitting time of -t^2/2 by x + W(t), at an array of t.

    With ``scaled`` the values are multiplied by exp(t^3/6).  With
    ``include_zero`` t = 0 is admitted and gets the right limit 0.  Returns
    (values, error estimates).
    """
    cfg = cfg or SeriesConfig()
    if not (math.isfinite(x) and x > 0):
        raise DomainError("x must be positive")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(~np.isfinite(t)) or np.any(t < 0) or (not include_zero and np.any(t == 0)):
        raise DomainError("t must be positive")
    tab = _table(cfg)
    d = CBRT2 * x
    out = np.zeros_like(t)
    err = np.zeros_like(t)
    # far below the diffusive scale the density underflows
    live = x * x < 1480.0 * t
    if not live.any():
        return out, err
    tl = t[live]
    n = cfg.n_direct
    ratio = airy(tab.a[:n] + d)[0] / tab.aip[:n]
    expo = np.exp(np.outer(tl, tab.a[:n]) * _INV_CBRT2)
    terms = expo * ratio[None, :]
    direct = _sum(terms, cfg.compensated_summation, axis=1)
    derr = n * _EPS * np.max(np.abs(terms), axis=1)
    total = np.atleast_1d(direct)
    if cfg.asymptotic and d <= _shift_limit(tab, cfg):
        y = -tab.a

        def F(yy):
            return np.exp(-np.outer(tl, yy) * _INV_CBRT2) * asy.shifted_ratio(yy, d)[None, :]

        tail, terr = asy.smooth_tail(F, y, cfg.K)
        total = total + tail
        derr = derr + terr
    elif not cfg.asymptotic:
        k = cfg.K
        nxt = np.exp(tab.a[k] * tl * _INV_CBRT2) * abs(ratio[-1])
        derr = derr + 1.5 * nxt * (1.0 + 1.0 / np.maximum(tl, 1e-300))
    vals = _INV_CBRT2 * total
    if not scaled:
        vals = vals * np.exp(-(tl**3) / 6.0)
        derr = derr * np.exp(-(tl**3) / 6.0)
    vals, _, _ = _clamp(vals, 0.0, np.inf)
    out[live] = vals
    err[live] = _INV_CBRT2 * derr
    return out, err


def hitting_density(x: float, t: float, cfg: SeriesConfig | None = None) -> float:
    """Density of tau = inf{t >= 0 : x + W(t) = -t^2/2} at t > 0 (defective)."""
    return float(hitting_density_values(x, [t], cfg)[0][0])


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def hitting_cumulative(x: float, t, cfg: SeriesConfig | None = None):
    """P(tau <= t_i) on an increasing grid t_0 = 0 < t_1 < ...

    Each step is integrated with 12-point Gauss-Legendre; the density is
    smooth with all derivatives vanishing at t = 0.
    """
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or len(t) < 1 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
        raise DomainError("grid must start at 0 and increase")
    lo, hi = t[:-1, None], t[1:, None]
    nodes = 0.5 * (lo + hi) + 0.5 * (hi - lo) * _GL_NODES[None, :]
    vals, _ = hitting_density_values(x, nodes.reshape(-1), cfg)
    steps = 0.5 * (hi[:, 0] - lo[:, 0]) * (vals.reshape(nodes.shape) @ _GL_WEIGHTS)
    return np.concatenate([[0.0], np.cumsum(steps)])


_HIT_SPEC = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-11, max_subdivisions=1000)
_HIT_BREAKS = (0.05, 0.2, 1.0, 3.0, 8.0)


def _hitting_start(x, rel):
    # P(tau <= t0) <= P(max_{s<=t0} W(s) >= x) = erfc(x / sqrt(2 t0))
    t0 = x * x / 20.0
    while math.erfc(x / math.sqrt(2.0 * t0)) > rel * 1e-3:
        t0 *= 0.8
    return t0


def hitting_laplace(x: float, z: float, cfg: SeriesConfig | None = None):
    """(integral of e^{t^3/6 - z t} f_tau(t) over t > 0, Ai(c(z+x)) / Ai(c z))
    with c = 2^(1/3); the two agree for z >= 0."""
    if not z >= 0:
        raise DomainError("z must be nonnegative")
    t0 = _hitting_start(x, 1e-10)
    # the scaled density decays like exp(-(c^-1 |a_1| + z) t)
    top = 40.0 / (_INV_CBRT2 * 2.338 + z) + 1.0
    res = integrate(
        lambda t: hitting_density_values(x, t, cfg, scaled=True)[0] * np.exp(-z * t),
        t0,
        top,
        _HIT_SPEC,
        breakpoints=[b for b in _HIT_BREAKS if t0 < b < top],
    )
    rhs = float(airy(CBRT2 * (z + x))[0] / airy(CBRT2 * z)[0])
    return float(res.value), rhs


def hitting_mass(x: float, cfg: SeriesConfig | None = None) -> float:
    """Total mass of the hitting-time density; equals G(x) = P(tau < inf)."""
    t0 = _hitting_start(x, 1e-10)
    res = integrate(
        lambda t: hitting_density_values(x, t, cfg)[0],
        t0,
        12.0,
        _HIT_SPEC,
        breakpoints=[b for b in _HIT_BREAKS if t0 < b < 12.0],
    )
    return float(res.value)


# ------------------------------------------------------------- Parseval

_G_SPEC = QuadratureSpec(abs_tol=1e-11, rel_tol=1e-11, max_subdivisions=400)
G_SUPPORT = 12.0  # G(12) < 1e-30


def gparseval_check(cfg: SeriesConfig | None = None):
    """(integral of G^2 over [0, inf) by quadrature,
    2^(-1/3) pi^2 sum Hi(a_k)^2 with its tail)."""
    cfg = cfg or SeriesConfig()
    res = integrate(lambda x: series_G(x, cfg).values ** 2, 0.0, G_SUPPORT, _G_SPEC)
    tab = _table(cfg)
    n = cfg.n_direct
    hi = tab.hi[:n]
    total = _sum(hi * hi, cfg.compensated_summation)
    y = -tab.a
    if cfg.asymptotic:
        t, _ = asy.smooth_tail(
            lambda yy: ((asy.phi_smooth(yy) + 1.0 / yy) / math.pi) ** 2, y, cfg.K, leading=_HI2_LEAD
        )
        total += float(t)
    else:
        # Hi(a_k)^2 ~ C k^(-4/3): remainder ~ 3 K Hi(a_K)^2
        total += 3.0 * (n + 0.5) * float(tab.hi[n]) ** 2
    return float(res.value), math.pi**2 / CBRT2 * total


def g_integrals(cfg: SeriesConfig | None = None):
    """Quadratures of the series G: (E N, E N^2, E M^2) as
    (int G, 2 int x G, 2 int x (2G - G^2)), each with an error estimate."""
    cfg = cfg or SeriesConfig()

    def f(x):
        g = series_G(x, cfg).values
        return np.stack([g, 2.0 * x * g, 2.0 * x * (2.0 * g - g * g)])

    res = integrate(f, 0.0, G_SUPPORT, _G_SPEC)
    return [(float(v), float(e)) for v, e in zip(res.value, np.broadcast_to(res.error, (3,)))]
