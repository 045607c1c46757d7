import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate
from scipy import special

from parabolic_max.airy import AI0, AIP0
from parabolic_max.integrals import (
    FORMS,
    airy_identity_suite,
    em3_integrand,
    em_integrand,
    em_via_integral,
    integral_moments,
    laplace_airy_check,
    parseval_sum,
)
from parabolic_max.quadrature import (
    QuadratureError,
    QuadratureSpec,
    gauss_kronrod_rule,
    integrate,
    integrate_semi_infinite,
)
from parabolic_max.zeros import zero_table

EM_SERIES = 0.996193019928363


def _scipy_em3():
    def f(t):
        ai, _, bi, _ = special.airy(t)
        return (ai * ai + math.sqrt(3) * ai * bi) / (ai * ai + bi * bi)

    val, _ = sp_integrate.quad(f, 0, 12, epsabs=1e-14, epsrel=1e-14, limit=200)
    return 2 ** (2 / 3) * val


@pytest.mark.parametrize("form", FORMS)
def test_em_forms_match_series(form):
    res = em_via_integral(form)
    assert res.value == pytest.approx(EM_SERIES, abs=1e-8)
    assert res.value == pytest.approx(0.9961930199, abs=1e-8)
    assert res.error < 1e-10


def test_em_forms_mutually_consistent():
    vals = [em_via_integral(f).value for f in FORMS]
    assert max(vals) - min(vals) <= 1e-9


def test_em3_against_scipy_quadrature():
    assert em_via_integral("em3").value == pytest.approx(_scipy_em3(), abs=1e-11)


def test_em3_integrand_at_origin():
    assert float(em3_integrand(np.array([0.0]))[0]) == pytest.approx(1.0, abs=1e-15)
    assert float(em3_integrand(np.array([0.0]), scaled=False)[0]) == pytest.approx(1.0, abs=1e-15)


def test_scaled_integrand_matches_unscaled():
    t = np.linspace(6.0, 12.0, 121)
    np.testing.assert_allclose(em3_integrand(t), em3_integrand(t, scaled=False), rtol=1e-11)


def test_em3_stable_under_more_subdivisions():
    a = em_via_integral("em3", QuadratureSpec(abs_tol=1e-13, rel_tol=1e-13, max_subdivisions=2000)).value
    b = em_via_integral("em3", QuadratureSpec(abs_tol=1e-13, rel_tol=1e-13, max_subdivisions=4000)).value
    assert a == pytest.approx(b, abs=1e-10)


def test_unknown_form():
    with pytest.raises(ValueError):
        em_via_integral("em1")
    with pytest.raises(ValueError):
        em_integrand("em9", np.array([1.0]))


def test_integral_moments_route():
    ms = integral_moments()
    assert ms.em == pytest.approx(EM_SERIES, abs=1e-10)
    assert ms.en == pytest.approx(0.6955289995223468, abs=1e-10)
    assert ms.en2 == pytest.approx(0.7966334517173936, abs=1e-10)
    assert ms.em2 == pytest.approx(1.3258225695989632, abs=1e-10)


# ------------------------------------------------------------ quadrature


def test_engine_self_tests():
    spec = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-14)
    res = integrate_semi_infinite(lambda t: np.exp(-t), 0.0, lambda T: math.exp(-T), spec)
    assert abs(res.value - 1.0) <= max(res.error, 1e-15)
    want = 3 ** (-1 / 3) * math.gamma(2 / 3)
    res = integrate_semi_infinite(lambda t: t * np.exp(-(t**3) / 3), 0.0, lambda T: math.exp(-(T**3) / 3) / T, spec)
    assert abs(res.value - want) <= max(res.error, 2e-15)


def test_error_estimates_cover_true_errors():
    cases = [
        (np.sin, 0.0, math.pi, 2.0),
        (lambda x: np.sqrt(x), 0.0, 1.0, 2 / 3),
        (lambda x: 1 / (1 + x * x), -5.0, 5.0, 2 * math.atan(5.0)),
    ]
    for f, a, b, want in cases:
        res = integrate(f, a, b, QuadratureSpec(abs_tol=1e-12, rel_tol=1e-12))
        assert abs(res.value - want) <= res.error + 1e-15


def test_kronrod_rule_integrates_polynomials():
    nodes, kw, gw = gauss_kronrod_rule(10)
    for p in range(0, 31):
        exact = 2 / (p + 1) if p % 2 == 0 else 0.0
        assert float(np.sum(kw * nodes**p)) == pytest.approx(exact, abs=1e-14)
    assert np.count_nonzero(gw) == 10
    assert float(np.sum(gw * nodes**18)) == pytest.approx(2 / 19, abs=1e-14)
    assert float(np.sum(gw * nodes**20)) != pytest.approx(2 / 21, abs=1e-6)


def test_quadrature_failure_is_reported():
    with pytest.raises(QuadratureError):
        integrate(lambda x: np.sin(1 / np.maximum(x, 1e-300)), 0.0, 1.0, QuadratureSpec(max_subdivisions=20))


# ------------------------------------------------------------- identities


def test_identity_suite_passes():
    reports = airy_identity_suite()
    assert len(reports) >= 40
    failed = [r for r in reports if not r.passed]
    assert not failed, failed
    for r in reports:
        assert r.passed == (r.abs_gap <= r.tol)


def test_identity_suite_named_examples():
    reports = {r.name: r for r in airy_identity_suite(k_max=2)}
    names = " | ".join(reports)
    for fragment in ("orthogonal", "norm", "two-point", "diagonal", "recursion", "exp-moment"):
        assert fragment in names, fragment


@pytest.mark.parametrize("z", [0.5, 1.0, 2.0])
def test_laplace_of_ai(z):
    r = laplace_airy_check(z)
    assert r.passed
    assert r.rhs == pytest.approx(math.exp(z**3 / 3), rel=1e-7)


def test_laplace_tail_bound_is_active():
    full = laplace_airy_check(0.5)
    short = laplace_airy_check(0.5, neg_cut=20.0)
    assert abs(short.rhs - full.rhs) > full.tol


def test_parseval_sum():
    target = (3 ** (1 / 3) * math.gamma(2 / 3) / math.gamma(1 / 3)) ** 2
    assert (AIP0 / AI0) ** 2 == pytest.approx(target, rel=1e-15)
    tailed = parseval_sum(1000)
    assert tailed.abs_gap <= 1e-7 and tailed.passed
    untailed = parseval_sum(1000, tail=False)
    # the k^(-4/3) remainder: about 3 (3 pi / 2)^(-4/3) K^(-1/3)
    assert untailed.abs_gap == pytest.approx(3 * (1.5 * math.pi) ** (-4 / 3) * 1000 ** (-1 / 3), rel=0.05)
    # integral comparison: the remainder is below 2 / (pi sqrt|a_K|)
    assert untailed.abs_gap <= 2 / (math.pi * math.sqrt(abs(zero_table(1000).a[-1])))


def test_parseval_partial_sums_increase():
    a = zero_table(2000).a
    partial = np.cumsum(1 / a**2)
    assert np.all(np.diff(partial) > 0)
    assert partial[-1] < (AIP0 / AI0) ** 2
