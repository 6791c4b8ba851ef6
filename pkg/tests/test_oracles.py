import math

import numpy as np
import pytest
from scipy import stats

from pulseload.cox import CoxModel, empirical_mean_measure, fit_cox
from pulseload.extremal import fit_theta, runs_curve, runs_estimator
from pulseload.oracles import (
    SyntheticSpec,
    cluster_size_theta,
    gen_cox_stream,
    gen_iid,
    gen_max_ar,
    gen_moving_maxima,
    generate,
)
from pulseload.series import chi_squared_exponential_test, empirical_cdf, interarrival_times


def test_single_draw(rng):
    assert gen_iid("normal", 1, rng).shape == (1,)


def test_iid_validation(rng):
    with pytest.raises(ValueError):
        gen_iid("cauchy", 10, rng)
    with pytest.raises(ValueError):
        gen_iid("normal", 0, rng)


@pytest.mark.parametrize("marginal, params", [("frechet", {}), ("exponential", {"scale": 2.0}), ("lognormal", {"s": 0.5}), ("gumbel", {})])
def test_iid_marginals_match(marginal, params):
    x = gen_iid(marginal, 20_000, np.random.default_rng(1), **params)
    dist = {
        "frechet": stats.invweibull(1.0),
        "exponential": stats.expon(scale=2.0),
        "lognormal": stats.lognorm(0.5),
        "gumbel": stats.gumbel_r(),
    }[marginal]
    assert stats.kstest(x, dist.cdf).pvalue > 1e-3


@pytest.mark.slow
def test_iid_runs_estimate_at_95th():
    x = gen_iid("frechet", 100_000, np.random.default_rng(548))
    est = runs_estimator(x, np.quantile(x, 0.95), 2)
    assert 0.9 <= est.theta_hat <= 1.0


@pytest.mark.slow
def test_iid_empirical_cdf_at_true_quantile():
    x = gen_iid("normal", 100_000, np.random.default_rng(549))
    assert empirical_cdf(x, stats.norm.ppf(0.9)) == pytest.approx(0.90, abs=0.01)


def test_max_ar_margins_are_unit_frechet():
    x = gen_max_ar(0.5, 20_000, np.random.default_rng(2))
    assert stats.kstest(x, stats.invweibull(1.0).cdf).pvalue > 1e-3


def test_max_ar_validation(rng):
    for a in (0.0, 1.0, -0.2):
        with pytest.raises(ValueError):
            gen_max_ar(a, 10, rng)


@pytest.mark.slow
def test_max_ar_small_coupling_is_nearly_iid():
    x = gen_max_ar(0.01, 100_000, np.random.default_rng(556))
    assert runs_estimator(x, np.quantile(x, 0.99), 2).theta_hat >= 0.9


@pytest.mark.slow
def test_max_ar_half_cluster_size():
    x = gen_max_ar(0.5, 100_000, np.random.default_rng(557))
    size, inv = cluster_size_theta(x, np.quantile(x, 0.99), 2)
    assert size == pytest.approx(2.0, abs=0.4)
    assert inv == pytest.approx(0.5, abs=0.1)


@pytest.mark.slow
def test_max_ar_pipeline_fit():
    x = gen_max_ar(0.25, 100_000, np.random.default_rng(558))
    fit = fit_theta(*runs_curve(x, np.quantile(x, np.linspace(0.90, 0.995, 16)), 2)[:2])
    assert 0.65 <= fit.theta <= 0.85


def test_moving_maxima_single_weight():
    x = gen_moving_maxima([3.0], 20_000, np.random.default_rng(4))
    assert stats.kstest(x / 3.0, stats.invweibull(1.0).cdf).pvalue > 1e-3
    assert SyntheticSpec("moving_maxima", 10, {"weights": [3.0]}).theta_true == 1.0


def test_moving_maxima_construction():
    rng = np.random.default_rng(5)
    z = -1.0 / np.log(np.random.default_rng(5).uniform(size=12))
    x = gen_moving_maxima([1.0, 2.0, 0.5], 10, rng)
    expected = [max(1.0 * z[i + 2], 2.0 * z[i + 1], 0.5 * z[i]) for i in range(10)]
    np.testing.assert_allclose(x, expected)


@pytest.mark.slow
@pytest.mark.parametrize("r", [2, 3, 5])
def test_moving_maxima_pair(r):
    x = gen_moving_maxima([1.0, 1.0], 100_000, np.random.default_rng(566 + r))
    u = np.quantile(x, 0.99)
    est = runs_estimator(x, u, r).theta_hat
    assert est == pytest.approx(0.5, abs=0.1)
    assert cluster_size_theta(x, u, r)[1] == pytest.approx(est, abs=0.1)


def test_theta_true_contracts():
    assert SyntheticSpec("moving_maxima", 1, {"weights": [2, 1, 1]}).theta_true == 0.5
    assert SyntheticSpec("moving_maxima", 1, {"weights": [1, 1]}).theta_true == 0.5
    assert SyntheticSpec("max_ar", 1, {"a": 0.25}).theta_true == 0.75
    assert SyntheticSpec("iid", 1).theta_true == 1.0
    with pytest.raises(ValueError):
        SyntheticSpec("other", 1).theta_true


def test_moving_maxima_validation(rng):
    with pytest.raises(ValueError):
        gen_moving_maxima([1.0, -1.0], 10, rng)
    with pytest.raises(ValueError):
        gen_moving_maxima([], 10, rng)


@pytest.mark.parametrize(
    "spec",
    [
        SyntheticSpec("iid", 50, {"marginal": "gumbel"}),
        SyntheticSpec("max_ar", 50, {"a": 0.3}),
        SyntheticSpec("moving_maxima", 50, {"weights": [1, 2]}),
    ],
)
def test_generators_deterministic(spec):
    a = generate(spec, np.random.default_rng(17))
    b = generate(spec, np.random.default_rng(17))
    np.testing.assert_array_equal(a, b)
    assert a.shape == (50,)


def test_cluster_oracle_hand_example():
    seq = [1, 5, 6, 1, 1, 7, 1, 9]
    # r=2: clusters {5,6} {7} {9}; r=3: clusters {5,6} {7, 9}
    assert cluster_size_theta(seq, 4, 2) == pytest.approx((4 / 3, 3 / 4))
    assert cluster_size_theta(seq, 4, 3) == pytest.approx((2.0, 0.5))
    with pytest.raises(ValueError):
        cluster_size_theta(seq, 10, 2)


# ---------------------------------------------------------- event streams


def test_poisson_stream_with_iid_marks():
    model = CoxModel(math.log(3.0), 0.0, 1.0)
    s = gen_cox_stream(model, 2000.0, None, np.random.default_rng(6), loc=85.0, scale=10.0)
    assert s.observation_span == 2000.0
    assert len(s) == pytest.approx(6000, rel=0.05)
    assert s.trigger_level == 85.0
    assert np.all(s.magnitudes > 85.0)
    assert chi_squared_exponential_test(interarrival_times(s)).significance > 0.01


def test_stream_deterministic():
    spec = SyntheticSpec("max_ar", 0, {"a": 0.5})
    a = gen_cox_stream(CoxModel(0.53, 0.56, 19.4), 200.0, spec, np.random.default_rng(3))
    b = gen_cox_stream(CoxModel(0.53, 0.56, 19.4), 200.0, spec, np.random.default_rng(3))
    np.testing.assert_array_equal(a.times, b.times)
    np.testing.assert_array_equal(a.magnitudes, b.magnitudes)


def test_stream_can_be_empty():
    s = gen_cox_stream(CoxModel(-15.0, 0.0, 1.0), 1.0, None, np.random.default_rng(0), loc=85.0)
    assert len(s) == 0
    assert s.trigger_level == 85.0


@pytest.mark.slow
def test_stream_fit_recovers_mean_rate():
    # median over independent 60-day records of the reference model
    model = CoxModel(0.53, 0.56, 19.4)
    seeds = np.random.SeedSequence(575).spawn(20)
    fits = [fit_cox(empirical_mean_measure(gen_cox_stream(model, 1440.0, None, np.random.default_rng(s)), np.arange(1.0, 25.0)))
            for s in seeds]
    assert np.median([f.mean_intensity for f in fits]) == pytest.approx(model.mean_intensity, rel=0.15)


@pytest.mark.slow
def test_stream_with_max_ar_marks():
    spec = SyntheticSpec("max_ar", 0, {"a": 0.5})
    s = gen_cox_stream(CoxModel(math.log(50.0), 0.3, 5.0), 2000.0, spec, np.random.default_rng(576))
    x = s.magnitudes
    fit = fit_theta(*runs_curve(x, np.quantile(x, np.linspace(0.90, 0.995, 16)), 2)[:2])
    assert fit.theta == pytest.approx(0.5, abs=0.1)
    assert cluster_size_theta(x, np.quantile(x, 0.99), 2)[1] == pytest.approx(0.5, abs=0.1)
