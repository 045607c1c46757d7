import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parabolic_max import _backend
from parabolic_max.airy import (
    AI0,
    AIP0,
    BI0,
    DomainError,
    ai_primitive,
    airy,
    airy_eval,
    airy_eval_scaled,
    airy_scaled,
)
from parabolic_max.scorer import ASYMPTOTIC_FROM, phi_asymptotic, phi_integral, phi_weight, scorer_gi, scorer_hi
from parabolic_max.zeros import airy_zero, zero_seed, zero_table

# mpmath at 40 digits: (x, Ai, Ai', Bi, Bi')
AIRY_ORACLE = [
    (-30.5, -0.0043336372887428654469, -1.3256903303662555097, 0.24003697268306095251, -0.021965974797896019241),
    (-7.25, 0.32374057321118614622, -0.30022899504735408146, 0.11559126100955656602, 0.87602871410754552605),
    (-2.0, 0.22740742820168557599, 0.61825902074169104141, -0.41230258795639848808, 0.27879516692116952269),
    (0.0, 0.35502805388781723926, -0.25881940379280679841, 0.61492662744600073515, 0.44828835735382635791),
    (1.5, 0.071749497008105409674, -0.097382012842301319218, 1.8789415037478950009, 1.8862122548481654887),
    (4.6, 0.00026543212392445024292, -0.00058291417781033317114, 280.03639880129145403, 584.22732232556571141),
    (12.0, 1.393184688875360839e-13, -4.854736554985308463e-13, 329807225829.07417618, 1135507502443.3707424),
]

# (k, a_k, Ai'(a_k), Bi(a_k), Hi(a_k), phi)
ZERO_ORACLE = [
    (1, -2.3381074104597670385, 0.70121082272069136249, -0.45394320205833578358, 0.12454025221625428153, -0.036441606268061332824),
    (5, -7.9441335871208531231, 0.94733570944156776559, -0.33600537065305698383, 0.039914485647421256696, -0.00048399650041508717522),
    (50, -38.021008677255254433, -1.4009788839497689752, 0.22720534180099992764, 0.008371642909629322482, -9.567039324746672153e-7),
    (1000, -281.03151961252155284, -2.3100098040815814735, 0.13779590269329830029, 0.0011326482450805649987, -3.2063392938659602008e-10),
]


@pytest.mark.parametrize("x, ai, aip, bi, bip", AIRY_ORACLE)
def test_airy_matches_high_precision_values(x, ai, aip, bi, bip):
    v = airy_eval(x)
    for got, want in ((v.ai, ai), (v.aip, aip), (v.bi, bi), (v.bip, bip)):
        assert got == pytest.approx(want, rel=1e-11, abs=1e-13)


def test_values_at_origin_closed_forms():
    assert AI0 == pytest.approx(3 ** (-2 / 3) / math.gamma(2 / 3), rel=1e-15)
    assert AIP0 == pytest.approx(-(3 ** (-1 / 3)) / math.gamma(1 / 3), rel=1e-15)
    assert BI0 == pytest.approx(math.sqrt(3) * AI0, rel=1e-15)
    v = airy_eval(0.0)
    assert v.ai == pytest.approx(AI0, rel=1e-15)
    assert v.aip == pytest.approx(AIP0, rel=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-50.0, max_value=8.0))
def test_wronskian(x):
    v = airy_eval(x)
    scale = 1 + abs(v.ai * v.bip) + abs(v.aip * v.bi)
    assert abs(v.wronskian - 1 / math.pi) <= 1e-12 * scale


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=-40.0, max_value=20.0))
def test_airy_against_mpmath(x):
    mp.mp.dps = 30
    v = airy_eval(x)
    env = max(1.0, abs(x)) ** 0.25
    for got, want, fn in (
        (v.ai, mp.airyai(x), "ai"),
        (v.aip, mp.airyai(x, 1), "aip"),
        (v.bi, mp.airybi(x), "bi"),
        (v.bip, mp.airybi(x, 1), "bip"),
    ):
        want = float(want)
        # relative accuracy away from zeros, envelope-absolute near them
        assert abs(got - want) <= 1e-11 * abs(want) + 1e-13 * env, fn


def test_positive_axis_signs():
    x = np.linspace(0.0, 20.0, 401)
    ai, aip, bi, bip = airy(x)
    assert np.all(ai > 0) and np.all(bi > 0) and np.all(aip < 0) and np.all(bip > 0)


def _scaled_series(x, sign, terms=8):
    # sum_k (sign)^k u_k / zeta^k with u_k = Gamma(3k + 1/2) / (54^k k! Gamma(k + 1/2))
    zeta = 2 / 3 * x**1.5
    total, u = 0.0, 1.0
    for k in range(terms):
        if k:
            u *= (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
        total += sign**k * u / zeta**k
    return total


def test_scaled_asymptotics_at_50():
    s = airy_eval_scaled(50.0)
    lead_ai = 50.0**-0.25 / (2 * math.sqrt(math.pi))
    lead_bi = 50.0**-0.25 / math.sqrt(math.pi)
    # the leading term alone is off by 5 / (72 zeta) ~ 3e-4 at x = 50
    assert s.ai_scaled == pytest.approx(lead_ai, rel=5e-4)
    assert s.bi_scaled == pytest.approx(lead_bi, rel=5e-4)
    assert s.ai_scaled == pytest.approx(lead_ai * _scaled_series(50.0, -1), rel=1e-13)
    assert s.bi_scaled == pytest.approx(lead_bi * _scaled_series(50.0, 1), rel=1e-13)


def test_scaled_at_origin_and_far():
    s = airy_eval_scaled(0.0)
    assert s.ai_scaled == AI0 and s.bi_scaled == pytest.approx(BI0, rel=1e-15)
    big = airy_scaled(np.array([1e4]))
    assert all(np.all(np.isfinite(v)) for v in big)
    # Ai(100)/Bi(100) = (ai_s / bi_s) exp(-2 zeta) is only available in log form
    mp.mp.dps = 50
    s = airy_eval_scaled(100.0)
    zeta = 2 / 3 * 100**1.5
    log_ratio = math.log(s.ai_scaled / s.bi_scaled) - 2 * zeta
    want = float(mp.log(mp.airyai(100) / mp.airybi(100)))
    assert log_ratio == pytest.approx(want, rel=1e-13)


def test_scaled_consistent_with_unscaled():
    x = np.linspace(0.0, 30.0, 301)
    ai, aip, bi, bip = airy(x)
    a, ap, b, bp = airy_scaled(x)
    z = 2 / 3 * x**1.5
    np.testing.assert_allclose(a * np.exp(-z), ai, rtol=1e-11)
    np.testing.assert_allclose(b * np.exp(z), bi, rtol=1e-11)
    np.testing.assert_allclose(ap * np.exp(-z), aip, rtol=1e-11)
    np.testing.assert_allclose(bp * np.exp(z), bip, rtol=1e-11)


def test_domain_errors():
    with pytest.raises(DomainError):
        airy_eval(float("nan"))
    with pytest.raises(DomainError):
        airy_eval_scaled(-1.0)
    with pytest.raises(OverflowError):
        airy_eval(200.0)
    with pytest.raises(DomainError):
        scorer_hi(0.5)
    with pytest.raises(DomainError):
        airy_zero(0)


def test_backends_agree():
    x = np.linspace(-60.0, 60.0, 2001)
    for scaled in (False, True):
        xs = np.abs(x) if scaled else x
        c = _backend.kernels.airy_kernel(xs, scaled)
        p = _backend.pure.airy_kernel(xs, scaled)
        for u, v in zip(c, p):
            np.testing.assert_allclose(u, v, rtol=1e-14, atol=1e-300)


# ------------------------------------------------------------------ zeros


@pytest.mark.parametrize("k, a, aip, bi, hi, phi", ZERO_ORACLE)
def test_zero_records(k, a, aip, bi, hi, phi):
    r = airy_zero(k)
    assert r.a_k == pytest.approx(a, rel=1e-14)
    assert r.aip == pytest.approx(aip, rel=1e-12)
    assert r.bi == pytest.approx(bi, rel=1e-12)
    assert r.hi == pytest.approx(hi, rel=1e-12)
    assert r.gi == pytest.approx(bi - hi, rel=1e-12)
    assert r.phi == pytest.approx(phi, rel=1e-10)


def test_first_zero_by_bisection():
    # Maclaurin series of Ai converges everywhere; bisect it in mpmath
    mp.mp.dps = 30
    root = mp.findroot(mp.airyai, (mp.mpf("-2.4"), mp.mpf("-2.3")), solver="bisect")
    assert airy_zero(1).a_k == pytest.approx(float(root), abs=1e-14)


def test_zero_table_invariants():
    tab = zero_table(10**4)
    k = tab.k
    assert np.all(np.diff(tab.a) < 0) and tab.a[0] < 0
    ai = airy(tab.a[:1000])[0]
    assert np.max(np.abs(ai) / np.abs(tab.aip[:1000])) <= 1e-12
    assert np.all(np.sign(tab.aip) == (-1.0) ** (k + 1))
    assert np.all(np.sign(tab.bi) == (-1.0) ** k)
    assert np.all(tab.phi < 0)
    big = k >= 5
    assert np.all(np.abs(tab.phi[big]) <= 3 * np.abs(tab.a[big]) ** -4)
    sl = slice(9, 1000)
    for col, p in ((np.abs(tab.aip[sl]) * k[sl] ** (-1 / 6), None), (np.abs(tab.bi[sl]) * k[sl] ** (1 / 6), None)):
        assert col.min() > 0.3 and col.max() < 2.0


def test_zero_seed_gap_decays_like_k_minus_2():
    k = np.arange(5, 2001)
    tab = zero_table(2000)
    seed = -((3 * math.pi * (4 * k - 1) / 8) ** (2 / 3))
    gap = np.abs(seed / tab.a[4:] - 1)
    assert np.max(gap * k**2) <= 1.0
    # the refined seed is already close
    assert np.max(np.abs(zero_seed(k) - tab.a[4:])) < 1e-5


def test_zeros_against_mpmath_sample():
    mp.mp.dps = 25
    for k in (2, 17, 123, 999):
        assert airy_zero(k).a_k == pytest.approx(float(mp.airyaizero(k)), rel=1e-14)


def test_zero_record_is_deterministic():
    assert airy_zero(321) == airy_zero(321)


# ----------------------------------------------------------------- Scorer


def test_hi_values():
    assert float(scorer_hi(0.0)) == pytest.approx(0.4099510849640004901, abs=1e-14)
    assert float(scorer_hi(-3.0)) == pytest.approx(0.10076509199646988058, abs=1e-14)
    assert float(scorer_hi(-20.0)) == pytest.approx(0.01591152531410223451, abs=1e-14)
    assert float(scorer_hi(-20.0)) * 20 * math.pi == pytest.approx(1.0, abs=1e-3)


def test_gi_at_fifth_zero():
    a5 = airy_zero(5).a_k
    assert float(scorer_gi(a5)) == pytest.approx(float(airy(a5)[2] - scorer_hi(a5)), abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=-60.0, max_value=-0.5))
def test_phi_against_mpmath(a):
    mp.mp.dps = 40
    want = float(mp.pi * mp.scorerhi(a) + 1 / mp.mpf(a))
    assert phi_weight(a) == pytest.approx(want, rel=1e-10)


def test_phi_routes_agree_at_switch():
    for a in (-ASYMPTOTIC_FROM, -ASYMPTOTIC_FROM - 0.3, -ASYMPTOTIC_FROM + 0.3):
        assert phi_integral(a) == pytest.approx(float(phi_asymptotic(np.array([a]))[0]), rel=1e-10)


def test_phi_leading_behaviour():
    tab = zero_table(10**5)
    assert tab.phi[-1] * tab.a[-1] ** 4 == pytest.approx(-2.0, rel=1e-8)


# --------------------------------------------------------------- primitive


@pytest.mark.parametrize(
    "x, want",
    [(-10.0, 1.0990317364675462508), (-1.0, 0.7990073168004019475), (2.0, 0.020800577552653641681), (10.0, 3.4164317390540094304e-11)],
)
def test_ai_primitive_values(x, want):
    assert ai_primitive(x) == pytest.approx(want, abs=1e-11, rel=1e-9)


def test_ai_primitive_shape():
    assert ai_primitive(0.0) == pytest.approx(1 / 3, abs=1e-15)
    xs = np.linspace(-50, 50, 101)
    vals = [ai_primitive(x) for x in xs]
    # AI peaks at the first zero of Ai, where it exceeds 1
    assert all(0 < v < 1.3 for v in vals)
    assert ai_primitive(airy_zero(1).a_k) > 1.2
    assert 0 < ai_primitive(50.0) < 1e-100
    assert ai_primitive(-50.0) == pytest.approx(1.0, abs=0.05)
    # AI' = -Ai: decreasing exactly where Ai > 0
    for x in (-7.0, -3.0, 1.0, 5.0):
        step = 1e-4
        slope = (ai_primitive(x + step) - ai_primitive(x - step)) / (2 * step)
        assert slope == pytest.approx(-airy_eval(x).ai, abs=1e-7)


def test_ai_primitive_at_zeros():
    # AI(a_k) = -pi Ai'(a_k) Gi(a_k)
    for k in (1, 2, 7):
        r = airy_zero(k)
        assert ai_primitive(r.a_k) == pytest.approx(-math.pi * r.aip * r.gi, abs=1e-11)
