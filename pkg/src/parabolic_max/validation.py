"""Self-check suites run by ``parabolic-max validate``.

Each suite returns a list of :class:`Check` records; a check passes when its
measured gap is within its tolerance.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import montecarlo as mc
from .airy import airy
from .integrals import FORMS, airy_identity_suite, em_via_integral, parseval_sum
from .quadrature import QuadratureSpec, integrate
from .scorer import ASYMPTOTIC_FROM, phi_asymptotic, phi_integral
from .series import (
    SeriesConfig,
    g_integrals,
    gparseval_check,
    hitting_laplace,
    hitting_mass,
    moment_cross_check,
    moments,
    series_fN,
    series_G,
    tail_probability_G,
    tmean_with_error,
)
from .zeros import zero_table

__all__ = ["Check", "SUITES", "airy_checks", "identity_checks", "series_checks", "mc_checks", "run"]


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    gap: float
    tol: float
    passed: bool

    def as_dict(self):
        return asdict(self)


def _check(suite, name, gap, tol):
    gap = float(gap)
    return Check(suite, name, gap, float(tol), bool(gap <= tol))


# ---------------------------------------------------------------- airy


def airy_checks(points: int = 10**4, zeros: int = 1000):
    x = np.linspace(-50.0, 8.0, points)
    ai, aip, bi, bip = airy(x)
    scale = 1.0 + np.abs(ai * bip) + np.abs(aip * bi)
    wronskian = np.max(np.abs(ai * bip - aip * bi - 1.0 / math.pi) / scale)
    out = [_check("airy", f"wronskian on [-50, 8], {points} points", wronskian, 1e-12)]

    tab = zero_table(zeros)
    resid = np.max(np.abs(airy(tab.a)[0]) / np.abs(tab.aip))
    out.append(_check("airy", f"zero residual |Ai(a_k)/Ai'(a_k)|, k <= {zeros}", resid, 1e-12))
    out.append(_check("airy", "zeros strictly decreasing", float(np.any(np.diff(tab.a) >= 0)), 0.0))
    k = tab.k
    signs = np.all(np.sign(tab.aip) == (-1.0) ** (k + 1)) and np.all(np.sign(tab.bi) == (-1.0) ** k)
    out.append(_check("airy", "sign pattern of Ai'(a_k), Bi(a_k)", float(not signs), 0.0))
    out.append(_check("airy", "phi(k) < 0", float(np.any(tab.phi >= 0)), 0.0))

    # both phi routes around the switch point, including the nearest zeros
    near = [tab.a[tab.a > -ASYMPTOTIC_FROM][-1], -ASYMPTOTIC_FROM, tab.a[tab.a <= -ASYMPTOTIC_FROM][0]]
    gap = 0.0
    for a in near:
        direct = phi_integral(float(a))
        expansion = float(phi_asymptotic(np.array([a]))[0])
        gap = max(gap, abs(direct - expansion) / abs(expansion))
    out.append(_check("airy", f"phi integral vs expansion near a = -{ASYMPTOTIC_FROM:g}", gap, 1e-10))
    return out


# ---------------------------------------------------------- identities

_LAPLACE_X = (0.25, 0.5, 1.0)
_LAPLACE_Z = (0.0, 0.5, 1.0, 2.0)


def identity_checks(tol: float = 1e-9):
    out = [_check("identities", r.name, r.abs_gap, r.tol) for r in airy_identity_suite(tol=tol)]
    p = parseval_sum(1000, tail=True, tol=tol)
    out.append(_check("identities", "Parseval sum of a_k^-2 with tail, k <= 1000", p.abs_gap, p.tol))
    for x in _LAPLACE_X:
        for z in _LAPLACE_Z:
            lhs, rhs = hitting_laplace(x, z)
            out.append(_check("identities", f"hitting-time Laplace x={x:g} z={z:g} (relative)", abs(lhs / rhs - 1), 1e-7))
    return out


# --------------------------------------------------------------- series

_MASS_SPEC = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-11, max_subdivisions=400)
_SUPPORT = 12.0


def series_checks(full: bool = True):
    s = "series"
    ms = moments()
    out = []
    gi_form, split = moment_cross_check()
    gap = max(abs(gi_form[0] - split[0]), abs(gi_form[1] - split[1]))
    out.append(_check(s, "Gi form vs Bi - Hi form of the E N, E N^2 sums", gap, 1e-10))

    ems = {form: em_via_integral(form).value for form in FORMS}
    for form, value in ems.items():
        out.append(_check(s, f"E M series vs {form} integral", abs(value - ms.em), 1e-8))
    spread = max(ems.values()) - min(ems.values())
    out.append(_check(s, "integral forms mutually", spread, 1e-9))

    g2, hi_sum = gparseval_check()
    out.append(_check(s, "E M = 2 E N - integral of G^2", abs(ms.em - (2 * ms.en - g2)), 1e-8))
    out.append(_check(s, "integral of G^2 vs Scorer sum", abs(g2 - hi_sum), 1e-5))

    (en_q, _), (en2_q, _), (em2_q, _) = g_integrals()
    out.append(_check(s, "E N = integral of G", abs(en_q - ms.en), 1e-8))
    out.append(_check(s, "E N^2 = 2 integral of x G", abs(en2_q - ms.en2), 1e-6))
    out.append(_check(s, "E M^2 = 2 integral of x (2G - G^2)", abs(em2_q - ms.em2), 1e-6))

    x = np.linspace(0.1, 3.0, 59)
    step = 1e-4
    deriv = (series_G(x - step).values - series_G(x + step).values) / (2 * step)
    out.append(_check(s, "central difference of 1 - G vs f_N on [0.1, 3]", np.max(np.abs(deriv - series_fN(x).values)), 1e-5))

    mass = integrate(lambda x: series_fN(x, include_zero=True).values, 0.0, _SUPPORT, _MASS_SPEC).value
    out.append(_check(s, "integral of f_N", abs(mass - 1.0), 1e-8))
    for x0 in (0.25, 0.5, 1.0):
        out.append(_check(s, f"hitting mass = G at x={x0:g}", abs(hitting_mass(x0) - tail_probability_G(x0)), 1e-8))

    (en_t, em_t), _ = tmean_with_error()
    out.append(_check(s, "paired Scorer sum for E N", abs(en_t - ms.en), 1e-3))
    out.append(_check(s, "paired Scorer sum for E M", abs(em_t - ms.em), 1e-3))

    if full:
        plain = moments(SeriesConfig(K=10**6, tail_mode="none")).as_dict()
        gap = max(abs(plain[k] - v) for k, v in ms.as_dict().items())
        out.append(_check(s, "tails at K=200 vs plain sums to K=10^6", gap, 1e-8))
    return out


# ------------------------------------------------------------------- mc


def mc_checks(paths: int = 2 * 10**5, seed: int = 0, T: float = 4.0, h: float = 1e-4, sigmas: float = 3.0, workers=None):
    """3-sigma concordance of extrapolated Monte Carlo moments with the series.

    ``paths`` draws of N are simulated (2 * paths for M).
    """
    s = "mc"
    cfg = mc.McConfig(T=T, h=h, n=paths, seed=seed, workers=workers)
    sims = mc.simulate(cfg, -(-2 * paths // 4) * 4)
    pair = sims.pair_max()
    ms = moments()
    out = []
    for label, maxima, mean, var in (("N", sims, ms.en, ms.var_n), ("M", pair, ms.em, ms.var_m)):
        est = mc.extrapolated_mean(maxima, cfg.coarsen)
        out.append(_check(s, f"extrapolated mean of {label} (in stderr units)", abs(est.mean - mean) / est.stderr, sigmas))
        v, se = mc.extrapolated_variance(maxima, cfg.coarsen)
        out.append(_check(s, f"extrapolated variance of {label} (in stderr units)", abs(v - var) / se, sigmas))
        raw = mc.estimate(maxima.fine)
        out.append(_check(s, f"grid mean of {label} lies below the series value", float(raw.mean >= mean), 0.0))
    n = len(sims)
    g1 = tail_probability_G(1.0)
    frac = float(np.mean(sims.continuous > 1.0))
    se = math.sqrt(g1 * (1 - g1) / n)
    out.append(_check(s, "P(N > 1) from path maxima vs G(1) (in stderr units)", abs(frac - g1) / se, sigmas))
    return out


SUITES = {
    "airy": airy_checks,
    "identities": identity_checks,
    "series": series_checks,
    "mc": mc_checks,
}


def run(suite: str, paths: int = 2 * 10**5, seed: int = 0):
    if suite == "all":
        names = list(SUITES)
    elif suite in SUITES:
        names = [suite]
    else:
        raise ValueError(f"unknown suite {suite!r}")
    out = []
    for name in names:
        out.extend(SUITES[name](paths=paths, seed=seed) if name == "mc" else SUITES[name]())
    return out
