import math

import numpy as np
import pytest
from scipy import stats

from parabolic_max import _backend
from parabolic_max import montecarlo as mc
from parabolic_max.series import SeriesConfig, moments, series_G, tail_probability_G

EN, EM = 0.6955289995223468, 0.996193019928363
VAR_N, VAR_M = 0.3128728625408369, 0.3334220366449714


@pytest.fixture(scope="module")
def coarse_run():
    """10^6 draws of N at h = 1e-3 (and 2 * 10^6 for M)."""
    cfg = mc.McConfig(T=4.0, h=1e-3, n=10**6, seed=7)
    return cfg, mc.simulate(cfg, 2 * 10**6)


def test_config_validation():
    for bad in (dict(T=2.0), dict(h=2e-3), dict(h=0.0), dict(n=10), dict(seed=-1), dict(coarsen=3), dict(prune=5.0)):
        with pytest.raises(ValueError):
            mc.McConfig(**bad)
    assert mc.McConfig(T=4.0, h=1e-4).steps == 40000


def test_backend_parity():
    key = mc.McConfig(seed=3).key(0)
    for anti in (False, True):
        c = _backend.kernels.sample_paths(key, 5, 40, 4000, 1e-3, 0.5, 4, 25.0, anti)
        p = _backend.pure.sample_paths(key, 5, 40, 4000, 1e-3, 0.5, 4, 25.0, anti)
        np.testing.assert_array_equal(c, p)
    np.testing.assert_array_equal(_backend.kernels.uniform_stream(key, 9, 1000), _backend.pure.uniform_stream(key, 9, 1000))
    np.testing.assert_array_equal(_backend.kernels.normal_stream(key, 2, 1000), _backend.pure.normal_stream(key, 2, 1000))


def test_independent_of_worker_count():
    cfg = mc.McConfig(h=1e-3, n=10**4, seed=11, workers=1)
    count = 2 * mc.CHUNK + 17
    a = mc.simulate(cfg, count)
    b = mc.simulate(mc.McConfig(h=1e-3, n=10**4, seed=11, workers=3), count)
    for u, v in zip((a.fine, a.coarse, a.continuous), (b.fine, b.coarse, b.continuous)):
        np.testing.assert_array_equal(u, v)
    # a path depends only on (seed, stream, index)
    part = mc.simulate(cfg, 100)
    np.testing.assert_array_equal(part.fine, a.fine[:100])
    other = mc.simulate(cfg, 100, stream=1)
    assert not np.array_equal(other.fine, part.fine)


def test_normals_look_normal():
    z = _backend.kernels.normal_stream(mc.McConfig().key(5), 0, 10**6)
    assert stats.kstest(z, "norm").pvalue > 1e-3
    assert abs(z.mean()) < 5e-3 and abs(z.var() - 1) < 5e-3
    assert np.mean(np.abs(z) > 3.442619855899) == pytest.approx(2 * stats.norm.sf(3.442619855899), rel=0.1)
    u = _backend.kernels.uniform_stream(mc.McConfig().key(5), 0, 10**5)
    assert np.all((u > 0) & (u < 1))


def test_estimate_contracts():
    e = mc.estimate(np.full(5000, 2.5))
    assert e.mean == 2.5 and e.stderr == 0.0 and e.n_effective == 5000
    x = _backend.kernels.normal_stream(mc.McConfig().key(1), 0, 300_000)
    whole = mc.estimate(x)
    pieces = mc.estimate([x[:1234], x[1234:200_000], x[200_000:]])
    assert whole == pieces
    assert mc.estimate(x, n=1000) == mc.estimate(x[:1000])
    with pytest.raises(ValueError):
        mc.estimate(np.array([1.0]))


def test_sample_ordering_and_support(coarse_run):
    cfg, sims = coarse_run
    assert np.all(sims.fine >= 0) and np.all(sims.coarse >= 0)
    assert np.all(sims.continuous >= sims.fine) and np.all(sims.fine >= sims.coarse)


def test_grid_bias_is_downward(coarse_run):
    cfg, sims = coarse_run
    n_mean = mc.estimate(sims.fine[: cfg.n])
    m_mean = mc.estimate(sims.pair_max().fine)
    assert n_mean.mean + 3 * n_mean.stderr < EN
    assert m_mean.mean + 3 * m_mean.stderr < EM


def test_continuous_maxima_match_series(coarse_run):
    cfg, sims = coarse_run
    for x, want, var in ((sims.continuous, EN, VAR_N), (sims.pair_max().continuous, EM, VAR_M)):
        e = mc.estimate(x)
        assert abs(e.mean - want) <= 3 * e.stderr
        se_var = np.std((x - x.mean()) ** 2, ddof=1) / math.sqrt(len(x))
        assert abs(x.var(ddof=1) - var) <= 3 * se_var


def test_tail_at_one(coarse_run):
    cfg, sims = coarse_run
    g1 = tail_probability_G(1.0)
    frac = np.mean(sims.continuous > 1.0)
    assert abs(frac - g1) <= 3 * math.sqrt(g1 * (1 - g1) / len(sims))


def test_sqrt_n_law(coarse_run):
    cfg, sims = coarse_run
    small = mc.estimate(sims.fine[:10**4])
    big = mc.estimate(sims.fine[:10**6])
    assert small.stderr / big.stderr == pytest.approx(10.0, rel=0.05)


def test_m_cdf_is_square_of_n_cdf(coarse_run):
    cfg, sims = coarse_run
    n_samples = np.sort(sims.continuous)
    m_samples = np.sort(sims.pair_max().continuous)
    grid = np.linspace(0, 3, 61)
    fn = np.searchsorted(n_samples, grid, side="right") / len(n_samples)
    fm = np.searchsorted(m_samples, grid, side="right") / len(m_samples)
    assert np.max(np.abs(fm - fn**2)) <= mc.dkw_epsilon(len(m_samples)) + 2 * mc.dkw_epsilon(len(n_samples))


def test_dkw_against_series_cdf(coarse_run):
    cfg, sims = coarse_run
    cdf = lambda x: 1.0 - series_G(x, SeriesConfig(K=200)).values
    dist, eps, ok = mc.dkw_check(sims.continuous[:20_000], cdf, 0.0, 3.0)
    assert ok and dist < eps


def test_extrapolation_removes_most_bias(coarse_run):
    cfg, sims = coarse_run
    raw = mc.estimate(sims.fine).mean
    ext = mc.extrapolated_mean(sims, cfg.coarsen).mean
    assert abs(ext - EN) < 0.25 * abs(raw - EN)


def test_antithetic_pairs():
    cfg = mc.McConfig(h=1e-3, n=10**4, seed=2, antithetic=True)
    sims = mc.simulate(cfg, 20_000)
    r = np.corrcoef(sims.fine[0::2], sims.fine[1::2])[0, 1]
    assert r < -0.3
    est = mc.extrapolated_mean(sims, cfg.coarsen, antithetic=True)
    assert est.n_effective == 10_000
    pair = sims.pair_max()
    assert len(pair) == 10_000


def test_mc_moments_route():
    ms = mc.mc_moments(mc.McConfig(h=1e-3, n=10**4, seed=4))
    ref = moments()
    for q in ("en", "em", "en2", "em2", "var_n", "var_m"):
        assert abs(getattr(ms, q) - getattr(ref, q)) <= 4 * ms.err_est[q], q


def test_horizon_bound():
    assert mc.horizon_bound(4.0) == pytest.approx(4.27e-5, rel=0.01)
    assert mc.horizon_bound(5.0) == pytest.approx(1.5e-8, rel=0.05)
    assert mc.horizon_bound(6.0) == pytest.approx(1.3e-13, rel=0.05)
    assert mc.horizon_bound(10.0) < 1e-30
    # the bound dominates the chance that W(T) alone is above the drift
    for T in (3.0, 4.0, 5.0):
        assert mc.horizon_bound(T) >= stats.norm.sf(T**1.5 / 2)


def test_dkw_and_ks_helpers_match_scipy():
    assert mc.dkw_epsilon(10**6, 0.01) == pytest.approx(math.sqrt(math.log(200) / 2e6))
    rng = np.random.default_rng(0)
    x = rng.standard_normal(5000)
    dist, _, _ = mc.dkw_check(x, stats.norm.cdf, -50, 50)
    assert dist == pytest.approx(stats.kstest(x, "norm").statistic, abs=1e-12)
    y = rng.standard_normal(4000) + 0.05
    d, p = mc.ks_two_sample(x, y)
    ref = stats.ks_2samp(x, y, method="asymp")
    assert d == pytest.approx(ref.statistic, abs=1e-12)
    assert p == pytest.approx(ref.pvalue, abs=2e-3)


def test_scaled_side():
    np.testing.assert_allclose(mc.scaled_side([1.0, 2.0], 2.0), np.array([1.0, 2.0]) * 4 ** (1 / 3))
