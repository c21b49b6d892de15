import math

import numpy as np
import pytest
from scipy import stats

from conftest import corpus
from gammachaos import target
from gammachaos.chaos import ChaosElement, evaluate, moment2, moment3, moment4
from gammachaos.families import fixed_point, prop41_family, rank_one_counterexample
from gammachaos.montecarlo import (
    CHUNK,
    MCConfig,
    distance_correlation,
    ecf_distance,
    estimate_moments,
    gaussian_block,
    gaussian_stream,
    ks_statistic,
    ks_threshold,
    map_samples,
    sample_chaos,
    summarize,
)
from gammachaos.tensor import basis_vector


def test_config_validation():
    for bad in (dict(samples=0), dict(workers=0), dict(seed=-1), dict(seed=2 ** 64)):
        with pytest.raises(ValueError):
            MCConfig(**bad)


@pytest.mark.parametrize("dim", [1, 3, 4, 5, 9])
def test_blocks_are_index_addressed(dim):
    full = gaussian_block(7, 0, 100, dim)
    np.testing.assert_array_equal(full[37:41], gaussian_block(7, 37, 41, dim))
    cfg = MCConfig(seed=7, samples=100)
    np.testing.assert_array_equal(full[99], gaussian_stream(cfg, 99, dim))
    with pytest.raises(IndexError):
        gaussian_stream(cfg, 100, dim)
    assert not np.array_equal(full, gaussian_block(8, 0, 100, dim))


def test_normals_are_standard():
    z = gaussian_block(1, 0, 50_000, 3).ravel()
    assert ks_statistic(z, stats.norm.cdf) < ks_threshold(len(z))
    assert np.isfinite(z).all()


def test_worker_count_does_not_change_results():
    f = corpus(3, 1, (3,))[0]
    n = 2 * CHUNK + 123
    a = sample_chaos(f, MCConfig(seed=9, samples=n, workers=1))
    b = sample_chaos(f, MCConfig(seed=9, samples=n, workers=4))
    assert a.tobytes() == b.tobytes()
    c = map_samples(lambda z: z[:, 0], MCConfig(seed=9, samples=n, workers=3), f.dim)
    np.testing.assert_array_equal(c, gaussian_block(9, 0, n, f.dim)[:, 0])


@pytest.mark.parametrize("f", [fixed_point(2)] + corpus(21, 4, (2, 3, 4), max_nnz=5))
def test_moments_within_five_stderr(f):
    s = estimate_moments(f, MCConfig(seed=2, samples=100_000))
    assert abs(s.mean) < 5 * s.mean_se
    assert abs(s.var - moment2(f)) < 5 * s.var_se + 1e-12
    assert abs(s.m3_hat - moment3(f)) < 5 * s.m3_se + 1e-12
    assert abs(s.m4_hat - moment4(f)) < 5 * s.m4_se + 1e-12


def test_summarize_fields():
    s = summarize(np.array([1.0, -1.0, 1.0, -1.0]))
    assert (s.n, s.mean, s.var, s.m3_hat, s.m4_hat) == (4, 0.0, 1.0, 0.0, 1.0)
    assert set(s.to_dict()) == {"n", "mean", "mean_se", "var", "var_se",
                                "m3_hat", "m3_se", "m4_hat", "m4_se"}
    with pytest.raises(ValueError):
        summarize(np.array([1.0]))


def test_ks_statistic_matches_scipy():
    x = np.random.default_rng(0).normal(size=777)
    assert math.isclose(ks_statistic(x, stats.norm.cdf), stats.kstest(x, "norm").statistic,
                        rel_tol=1e-12)


def test_ks_self_calibration():
    # under the null the α = 0.05 test should reject roughly 5% of the time
    rng = np.random.default_rng(10)
    n, runs, nu = 400, 400, 1.5
    rej = sum(
        ks_statistic(target.sample_gamma_rep(nu, rng, n), lambda t: target.cdf(nu, t))
        > ks_threshold(n, 0.05)
        for _ in range(runs)
    )
    assert 0.01 * runs <= rej <= 0.10 * runs


def test_ks_threshold_values():
    assert ks_threshold(10_000, 0.01) == 0.01628
    assert math.isclose(ks_threshold(100, 0.05), 0.1358)
    with pytest.raises(KeyError):
        ks_threshold(100, 0.1)


def test_ecf_distance():
    x = sample_chaos(fixed_point(1), MCConfig(seed=4, samples=50_000))
    grid = np.linspace(-2, 2, 9)
    assert ecf_distance(x, lambda t: target.cf(1, t), grid) < 0.02
    assert ecf_distance(x, lambda t: target.cf(3, t), grid) > 0.1
    with pytest.raises(ValueError):
        ecf_distance(x, lambda t: target.cf(1, t), [np.nan])


def _dcor_brute(x, y):
    a = np.abs(x[:, None] - x[None, :])
    b = np.abs(y[:, None] - y[None, :])
    A = a - a.mean(0) - a.mean(1)[:, None] + a.mean()
    B = b - b.mean(0) - b.mean(1)[:, None] + b.mean()
    v = (A * B).mean() / math.sqrt((A * A).mean() * (B * B).mean())
    return math.sqrt(max(v, 0.0))


def test_distance_correlation_brute_force():
    rng = np.random.default_rng(6)
    x = rng.normal(size=300)
    for y in (rng.normal(size=300), x ** 2, 2 * x + 1, np.sin(3 * x) + 0.1 * rng.normal(size=300)):
        assert math.isclose(distance_correlation(x, y), _dcor_brute(x, y), rel_tol=1e-9)
    assert math.isclose(distance_correlation(x, 2 * x + 1), 1.0, rel_tol=1e-9)
    with pytest.raises(ValueError):
        distance_correlation(x, x[:-1])


def test_stream_determinism_and_independence():
    cfg = MCConfig(seed=123, samples=1_000_000)
    np.testing.assert_array_equal(gaussian_stream(cfg, 777, 3), gaussian_stream(cfg, 777, 3))
    z = gaussian_block(cfg.seed, 0, cfg.samples, 1)[:, 0]
    n = len(z)
    assert abs(z.mean()) < 4 * z.std() / math.sqrt(n)
    sq = z * z
    assert abs(sq.mean() - 1) < 4 * sq.std() / math.sqrt(n)
    c = z - z.mean()
    rho = float(c[:-1] @ c[1:] / (c @ c))
    assert abs(rho) < 4 / math.sqrt(n)


def test_worked_moment_estimates():
    s = estimate_moments(rank_one_counterexample(1), MCConfig(seed=1, samples=1_000_000))
    assert abs(s.m3_hat - 8) < 5 * s.m3_se
    s = estimate_moments(basis_vector(1, 0), MCConfig(seed=2, samples=200_000))
    assert abs(s.m4_hat - 3) < 5 * s.m4_se
    s = estimate_moments(prop41_family(2, 1, 8), MCConfig(seed=3, samples=200_000))
    assert abs(s.var - 2.5) < 5 * s.var_se


def test_summary_bit_identical_across_workers():
    f = prop41_family(2, 1, 4)
    a = estimate_moments(f, MCConfig(seed=5, samples=3 * CHUNK, workers=1))
    b = estimate_moments(f, MCConfig(seed=5, samples=3 * CHUNK, workers=4))
    assert a == b


def test_ks_calibration_at_full_size():
    # draws from the target itself pass the α = 0.01 test in at least 99 of 100 runs
    rng = np.random.default_rng(99)
    n = 100_000
    passed = sum(
        ks_statistic(target.sample_gamma_rep(1.0, rng, n), lambda t: target.cdf(1.0, t))
        < ks_threshold(n, 0.01)
        for _ in range(100)
    )
    assert passed >= 99


def test_ks_constant_sample():
    c = 0.7
    want = max(target.cdf(2, c), 1 - target.cdf(2, c))
    assert math.isclose(ks_statistic(np.full(50, c), lambda t: target.cdf(2, t)), want, rel_tol=1e-12)
    with pytest.raises(ValueError):
        ks_statistic([], lambda t: t)


def test_ecf_concentration():
    rng = np.random.default_rng(7)
    n = 100_000
    x = target.sample_gamma_rep(1.0, rng, n)
    grid = np.arange(-2.0, 2.5, 0.5)
    assert ecf_distance(x, lambda t: target.cf(1.0, t), grid) < 5 / math.sqrt(n)


def _dcor_pair(f, seed, n=10_000):
    z = gaussian_block(seed, 0, n, f.dim)
    return evaluate(ChaosElement(f), z), z[:, 0]


def test_joint_dependence_vanishes():
    # threshold calibrated on the same draws with the pairing broken
    perm = np.random.default_rng(0).permutation(10_000)
    dc = {}
    for label, f in (("rank1", rank_one_counterexample(2)),
                     (4, prop41_family(2, 1, 4)), (64, prop41_family(2, 1, 64))):
        x, xh = _dcor_pair(f, 11)
        dc[label] = distance_correlation(x, xh)
        if label == 64:
            threshold = 1.5 * distance_correlation(x, xh[perm])
    assert dc["rank1"] > dc[4] > dc[64]
    assert dc["rank1"] > threshold
    assert dc[64] < threshold
    x, xh = _dcor_pair(prop41_family(2, 1, 64), 12, n=100_000)
    w = x * xh
    assert abs(w.mean()) < 5 * w.std() / math.sqrt(len(w))
