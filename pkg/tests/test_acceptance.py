"""Acceptance suite: one test per criterion, tolerances fixed.

Run alone with ``pytest tests/test_acceptance.py -v``.  The Monte Carlo
criterion simulates 2 * 10^7 paths and takes most of its 10 minute budget.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy.interpolate import CubicHermiteSpline

from parabolic_max import montecarlo as mc
from parabolic_max import validation
from parabolic_max.integrals import FORMS, airy_identity_suite, em_via_integral, parseval_sum
from parabolic_max.quadrature import QuadratureSpec, integrate
from parabolic_max.series import (
    SeriesConfig,
    evaluate,
    hitting_laplace,
    mean_via_tmean,
    moments,
    series_fN,
    series_G,
)

# published reference values of the six moments
REFERENCE = {
    "en": 0.6955289995,
    "em": 0.9961930199,
    "en2": 1.1027982645,
    "em2": 1.8032957042,
    "var_n": 0.6190376754,
    "var_m": 0.8108951713,
}
MOMENT_TOL = 1e-8


def _gaps(values, reference, tol):
    """Return the entries whose gap exceeds tol, formatted for a failure message."""
    bad = {k: (values[k], reference[k], abs(values[k] - reference[k])) for k in reference}
    return {k: f"got {v:.12g} want {r:.12g} gap {g:.3g}" for k, (v, r, g) in bad.items() if not g <= tol}


def test_criterion_1_moment_regression():
    script = (
        "import json, time\n"
        "t = time.perf_counter()\n"
        "from parabolic_max.series import SeriesConfig, moments\n"
        "ms = moments(SeriesConfig(K=200, tail_mode='asymptotic'))\n"
        "print(json.dumps({'values': ms.as_dict(), 'seconds': time.perf_counter() - t}))\n"
    )
    res = subprocess.run([sys.executable, "-c", script], capture_output=True, text=True, check=True)
    out = json.loads(res.stdout)
    assert out["seconds"] <= 60.0
    bad = _gaps(out["values"], REFERENCE, MOMENT_TOL)
    assert not bad, bad


def test_criterion_2_route_agreement():
    em = moments().em
    values = {form: em_via_integral(form).value for form in FORMS}
    for form, v in values.items():
        assert abs(v - em) <= 1e-8, form
    assert max(values.values()) - min(values.values()) <= 1e-9


@pytest.mark.parametrize("x", [0.25, 0.5, 1.0])
def test_criterion_3_laplace_identity(x):
    for z in (0.0, 0.5, 1.0, 2.0):
        lhs, rhs = hitting_laplace(x, z)
        assert abs(lhs / rhs - 1.0) <= 1e-7, (x, z, lhs, rhs)


def test_criterion_4_identity_suite():
    reports = airy_identity_suite(tol=1e-9)
    reports.append(parseval_sum(1000, tail=True, tol=1e-9))
    names = " ".join(r.name for r in reports)
    for fragment in ("orthogonality", "norm", "first-moment weight", "two-point", "recursion", "exp-moment z=0.5",
                     "exp-moment z=1", "exp-moment z=2", "Parseval"):
        assert fragment in names, fragment
    failed = [(r.name, r.abs_gap) for r in reports if not (r.abs_gap <= 1e-9)]
    assert not failed, failed


def test_criterion_5_kernel_quality():
    checks = validation.airy_checks(points=10**4, zeros=1000)
    failed = [(c.name, c.gap, c.tol) for c in checks if not c.passed]
    assert not failed, failed
    assert [c.tol for c in checks if c.name.startswith(("wronskian", "zero residual"))] == [1e-12, 1e-12]
    assert [c.tol for c in checks if c.name.startswith("phi integral")] == [1e-10]


_DENSITY_SPEC = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-11, max_subdivisions=400)


def test_criterion_6_distribution_consistency():
    x = np.linspace(0.1, 3.0, 291)
    step = 1e-4
    deriv = (series_G(x - step).values - series_G(x + step).values) / (2 * step)
    assert np.max(np.abs(deriv - series_fN(x).values)) <= 1e-5

    grid = np.linspace(0.01, 6.0, 600)
    cdf_n = 1.0 - series_G(grid).values
    points = evaluate(grid)
    assert all(p.cdf_m == p.cdf_n**2 for p in points)
    assert np.array_equal([p.cdf_n for p in points], cdf_n)

    def densities(t):
        fn = series_fN(t, include_zero=True).values
        fm = 2.0 * (1.0 - series_G(t).values) * fn
        return np.stack([fn, fm, t * fn, t * fm, t * t * fn, t * t * fm])

    mass_n, mass_m, en, em, en2, em2 = integrate(densities, 0.0, 12.0, _DENSITY_SPEC).value
    assert abs(mass_n - 1.0) <= 1e-8 and abs(mass_m - 1.0) <= 1e-8
    got = {"en": en, "em": em, "en2": en2, "em2": em2, "var_n": en2 - en**2, "var_m": em2 - em**2}
    bad = _gaps(got, REFERENCE, 1e-6)
    assert not bad, bad


MC_PATHS = 2 * 10**7  # 10^7 draws of N and 10^7 pairs for M
KS_PATHS = 10**6
MC_BUDGET = 600.0


def _one_minus_g_interpolant(hi):
    grid = np.linspace(0.0, hi, 3001)
    g = series_G(grid).values
    f = series_fN(grid, include_zero=True).values
    return CubicHermiteSpline(grid, 1.0 - g, f)


@pytest.mark.slow
def test_criterion_7_monte_carlo_concordance():
    start = time.perf_counter()
    ms = moments()
    cfg = mc.McConfig(T=6.0, h=1e-4, coarsen=4, n=MC_PATHS // 2, seed=20240601)
    sims = mc.simulate(cfg, MC_PATHS)
    pair = sims.pair_max()
    half = mc.PathMaxima(sims.fine[: cfg.n], sims.coarse[: cfg.n], sims.continuous[: cfg.n])
    report = {}
    for label, maxima, target in (("N", half, ms.en), ("M", pair, ms.em)):
        est = mc.extrapolated_mean(maxima, cfg.coarsen)
        report[label] = (est.mean, est.stderr, abs(est.mean - target) / est.stderr)

    cdf = _one_minus_g_interpolant(3.5)
    dist, eps, dkw_ok = mc.dkw_check(half.continuous, cdf, 0.0, 3.0, alpha=0.01)

    steep = mc.simulate(cfg, KS_PATHS, gamma=2.0, stream=1).pair_max()
    ks_d, ks_p = mc.ks_two_sample(mc.scaled_side(steep.continuous, 2.0), pair.continuous)
    elapsed = time.perf_counter() - start

    for label, (_, _, sigmas) in report.items():
        assert sigmas <= 3.0, (label, report[label])
    assert dkw_ok, (dist, eps)
    assert ks_p >= 0.01, (ks_d, ks_p)
    assert elapsed <= MC_BUDGET, elapsed


def test_criterion_8_conditional_sums():
    en, em = mean_via_tmean()
    assert abs(en - REFERENCE["en"]) <= 1e-3
    assert abs(em - REFERENCE["em"]) <= 1e-3
