import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import signal

from pulseload.dependence import Acf, autocorrelation, run_length, scale_of_fluctuation, variance_function
from pulseload.errors import DataError


def _ar1(phi, n, rng):
    e = rng.standard_normal(n)
    x0 = rng.standard_normal() / np.sqrt(1 - phi**2)
    y, _ = signal.lfilter([1.0], [1.0, -phi], e, zi=[phi * x0])
    return y


def test_lag_zero_is_one(rng):
    assert autocorrelation(rng.normal(size=50), 10).values[0] == 1.0


def test_white_noise_band(rng):
    n = 20_000
    rho = autocorrelation(rng.standard_normal(n), 100).values[1:]
    assert np.mean(np.abs(rho) < 3 / np.sqrt(n)) >= 0.95


def test_ar1_acf():
    x = _ar1(0.5, 100_000, np.random.default_rng(145))
    rho = autocorrelation(x, 5).values
    np.testing.assert_allclose(rho, 0.5 ** np.arange(6), atol=0.02)


def test_biased_normalization():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    d = x - x.mean()
    acf = autocorrelation(x, 2)
    assert acf.values[1] == pytest.approx((d[:-1] @ d[1:]) / (d @ d))
    assert acf.values[2] == pytest.approx((d[:-2] @ d[2:]) / (d @ d))


def test_constant_sequence_rejected():
    with pytest.raises(DataError):
        autocorrelation(np.full(20, 3.0), 5)


@pytest.mark.parametrize("lag", [0, 10, 11])
def test_max_lag_bounds(lag):
    with pytest.raises(ValueError):
        autocorrelation(np.arange(10.0), lag)


def test_acf_validation():
    with pytest.raises(ValueError):
        Acf([0.9, 0.5])
    with pytest.raises(ValueError):
        Acf([1.0, 1.5])


# ------------------------------------------------------- variance function


def test_variance_function_unit_window():
    assert variance_function(Acf.geometric(0.7, 10), 1) == 1.0


@pytest.mark.parametrize("T", [1, 2, 5, 11])
def test_variance_function_white_noise(T):
    acf = Acf(np.r_[1.0, np.zeros(10)])
    assert variance_function(acf, T) == pytest.approx(1.0 / T)


def test_variance_function_hand_value():
    assert variance_function(Acf.geometric(0.5, 10), 4) == pytest.approx(0.515625, abs=1e-12)


def test_variance_function_matches_local_average_variance():
    # variance of the mean of T consecutive values of a process with the given ACF
    acf = Acf.geometric(0.6, 12)
    T = 7
    idx = np.arange(T)
    cov = acf.values[np.abs(idx[:, None] - idx[None, :])]
    assert variance_function(acf, T) == pytest.approx(cov.sum() / T**2, rel=1e-12)


def test_variance_function_window_bounds():
    with pytest.raises(ValueError):
        variance_function(Acf.geometric(0.5, 3), 5)


# ---------------------------------------------------- scale of fluctuation


def test_white_noise_scale_is_one():
    sof = scale_of_fluctuation(Acf(np.r_[1.0, np.zeros(50)]), [1, 10, 51])
    np.testing.assert_allclose(sof.estimates, 1.0)
    assert sof.converged_value == 1.0


def test_geometric_limit():
    sof = scale_of_fluctuation(Acf.geometric(0.5, 999), [10, 100, 1000])
    assert sof.converged_value == pytest.approx(3.0, rel=0.05)
    assert [w for w, _ in sof.tau_c_by_window] == [10, 100, 1000]


def test_converged_value_is_largest_window():
    sof = scale_of_fluctuation(Acf.geometric(0.5, 100), [50, 3, 20])
    assert sof.windows.tolist() == [3, 20, 50]
    assert sof.converged_value == sof.estimates[-1]


def test_estimated_ar1_scale():
    x = _ar1(0.5, 100_000, np.random.default_rng(7))
    sof = scale_of_fluctuation(autocorrelation(x, 200), [201])
    assert sof.converged_value == pytest.approx(3.0, rel=0.1)


rhos = arrays(float, st.integers(1, 60), elements=st.floats(0.0, 1.0))


@given(rhos)
def test_scaled_variance_non_decreasing_for_positive_acf(tail):
    acf = Acf(np.r_[1.0, tail])
    sof = scale_of_fluctuation(acf, range(1, acf.max_lag + 2))
    assert np.all(np.diff(sof.estimates) >= -1e-12)


@given(arrays(float, st.integers(5, 80), elements=st.floats(-100, 100)))
def test_variance_function_in_unit_interval(x):
    if np.ptp(x) < 1e-6:
        return
    acf = autocorrelation(x, x.size - 1)
    for T in range(1, acf.max_lag + 2):
        g = variance_function(acf, T)
        assert -1e-12 <= g <= 1.0 + 1e-12


# -------------------------------------------------------------- run length


@pytest.mark.parametrize("tau, r", [(0.7, 2), (3.4, 3), (2.5, 3), (1.0, 2), (1.6, 2), (7.49, 7)])
def test_run_length(tau, r):
    assert run_length(tau) == r


def test_run_length_positive():
    with pytest.raises(ValueError):
        run_length(0.0)
