"""Cox arrival process with a stationary lognormal intensity.

The intensity is Lambda(t) = exp(mu + sigma z(t)) with z a zero-mean,
unit-variance stationary Gaussian process. Its integral over [0, t], the
mean measure M_t, drives the event counts: given M_t = m, the count is
Poisson(m).

Two ways of correlating the intensity are supported by the simulators:

``"latent"`` (default)
    z has autocorrelation exp(-|tau|/tau0), simulated by the exact AR(1)
    update of an Ornstein-Uhlenbeck process. Lambda's own autocorrelation is
    then only approximately exponential.
``"intensity"``
    z's autocorrelation is chosen so that Lambda itself has autocorrelation
    exp(-|tau|/tau0) exactly. Paths are drawn by circulant embedding on the
    simulation grid. Under this mode the variance formula of
    :func:`mean_measure_moments` holds without approximation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import integrate, optimize, signal

from .errors import DataError, NumericalError
from .series import EventSeries

__all__ = [
    "CoxModel",
    "MeanMeasureMoments",
    "MomentCurve",
    "IntensityPath",
    "mean_measure_moments",
    "latent_correlation",
    "empirical_mean_measure",
    "fit_cox",
    "simulate_intensity",
    "sample_mean_measure",
    "simulate_events",
    "simulate_counts",
]

Correlation = Literal["latent", "intensity"]

_CHUNK = 2048


@dataclass(frozen=True)
class CoxModel:
    """Lognormal intensity parameters; times in hours."""

    mu: float
    sigma: float
    tau0: float

    def __post_init__(self):
        if not self.sigma >= 0:
            raise ValueError("sigma must be non-negative")
        if not self.tau0 > 0:
            raise ValueError("tau0 must be positive")

    @classmethod
    def from_intensity_moments(cls, mean: float, variance: float, tau0: float) -> "CoxModel":
        """Build from the stationary mean and variance of the intensity."""
        if not mean > 0 or not variance >= 0:
            raise ValueError("need mean > 0 and variance >= 0")
        s2 = math.log1p(variance / mean**2)
        return cls(math.log(mean) - s2 / 2.0, math.sqrt(s2), tau0)

    @property
    def mean_intensity(self) -> float:
        return math.exp(self.mu + self.sigma**2 / 2.0)

    @property
    def intensity_variance(self) -> float:
        return self.mean_intensity**2 * math.expm1(self.sigma**2)

    @property
    def intensity_cov(self) -> float:
        return math.sqrt(math.expm1(self.sigma**2))

    def default_dt(self) -> float:
        return self.tau0 / 50.0


@dataclass(frozen=True)
class MeanMeasureMoments:
    t: float
    mean: float
    variance: float


@dataclass(frozen=True, eq=False)
class MomentCurve:
    """Empirical (or model) first two moments of the mean measure over window lengths."""

    t: np.ndarray
    mean: np.ndarray
    variance: np.ndarray
    n_windows: np.ndarray | None = None
    count_variance: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class IntensityPath:
    dt: float
    values: np.ndarray
    cumulative: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.values.size) * self.dt


def _variance_bracket(t, tau0, form: str = "corrected"):
    t = np.asarray(t, dtype=float)
    if form == "corrected":
        return t * tau0 + tau0**2 * np.expm1(-t / tau0)
    if form == "cubic":
        return t * tau0 + tau0**3 * np.expm1(-t / tau0)
    raise ValueError(f"unknown form {form!r}")


def mean_measure_moments(
    model: CoxModel, t: float, form: Literal["corrected", "cubic"] = "corrected"
) -> MeanMeasureMoments:
    """Mean and variance of M_t assuming Lambda has autocorrelation exp(-|tau|/tau0).

    ``form="corrected"`` uses 2 var_L [t tau0 + tau0**2 (exp(-t/tau0) - 1)],
    the result of integrating the covariance over the square [0, t]^2.
    ``form="cubic"`` keeps a cubic tau0 term and exists only so the two can
    be compared against simulation.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    mean = t * model.mean_intensity
    var = 2.0 * model.intensity_variance * float(_variance_bracket(t, model.tau0, form))
    return MeanMeasureMoments(float(t), mean, var)


def latent_correlation(rho_intensity, intensity_cov: float):
    """Autocorrelation of z that gives Lambda = exp(mu + sigma z) the correlation ``rho_intensity``."""
    d2 = intensity_cov**2
    if d2 == 0:
        return np.asarray(rho_intensity, dtype=float)
    return np.log1p(np.asarray(rho_intensity, dtype=float) * d2) / math.log1p(d2)


def empirical_mean_measure(
    series: EventSeries, window_lengths, stride: float = 0.5, poisson_correction: bool = True
) -> MomentCurve:
    """Moments of the mean measure from counts in sliding windows [s, s + t).

    Window starts run over 0, stride, 2 stride, ... while the window fits in
    the observation span. The mean of M_t is estimated by the mean count. The
    count variance carries an extra Poisson term, Var N_t = E M_t + Var M_t,
    so with ``poisson_correction`` the mean count is subtracted from the
    unbiased count variance; the raw value is kept in ``count_variance``.

    Overlapping windows are correlated: the moments stay unbiased for a
    stationary process but are less precise than the window count suggests.
    """
    if not stride > 0:
        raise ValueError("stride must be positive")
    times = series.times
    span = series.observation_span
    ts, means, cvars, nw = [], [], [], []
    for t in np.asarray(list(window_lengths), dtype=float):
        if not 0 < t <= span:
            raise DataError(f"window length {t} h outside (0, span={span}]")
        starts = np.arange(0.0, span - t + 1e-9 * span, stride)
        if starts.size < 2:
            raise DataError(f"fewer than 2 windows of length {t} h")
        counts = np.searchsorted(times, starts + t, side="left") - np.searchsorted(times, starts, side="left")
        ts.append(t)
        means.append(counts.mean())
        cvars.append(counts.var(ddof=1))
        nw.append(starts.size)
    mean = np.array(means)
    cvar = np.array(cvars)
    var = cvar - mean if poisson_correction else cvar
    return MomentCurve(np.array(ts), mean, var, np.array(nw), cvar)


def _variance_stage(t: np.ndarray, v: np.ndarray, tau0: float) -> tuple[float, float]:
    g = 2.0 * _variance_bracket(t, tau0)
    gg = float(g @ g)
    scale = float(g @ v) / gg
    res = v - scale * g
    return scale, float(res @ res)


def fit_cox(curve: MomentCurve, tau0_bounds: tuple[float, float] | None = None, n_grid: int = 400) -> CoxModel:
    """Least-squares Cox parameters from a mean-measure moment curve.

    1. Mean intensity by regression of mean counts on t through the origin.
    2. Intensity variance and tau0 by least squares on the variance curve:
       a log grid over tau0 with the variance solved in closed form at each
       rung, then bounded refinement.
    3. sigma**2 = ln(1 + var/mean**2), mu = ln(mean) - sigma**2 / 2.
    """
    t = np.asarray(curve.t, dtype=float)
    m = np.asarray(curve.mean, dtype=float)
    v = np.asarray(curve.variance, dtype=float)
    if t.size < 3:
        raise DataError("need at least 3 window lengths to fit the variance curve")
    mean_rate = float(t @ m / (t @ t))
    if not mean_rate > 0:
        raise NumericalError(f"non-positive mean intensity estimate {mean_rate}")
    if tau0_bounds is None:
        tau0_bounds = (1e-3 * t.min(), 1e3 * t.max())
    grid = np.linspace(math.log(tau0_bounds[0]), math.log(tau0_bounds[1]), n_grid)
    sse = np.array([_variance_stage(t, v, math.exp(s))[1] for s in grid])
    j = int(np.argmin(sse))
    best = grid[j]
    lo, hi = grid[max(j - 1, 0)], grid[min(j + 1, n_grid - 1)]
    opt = optimize.minimize_scalar(
        lambda s: _variance_stage(t, v, math.exp(s))[1],
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    if opt.success and opt.fun <= sse[j]:
        best = float(opt.x)
    tau0 = math.exp(best)
    var_rate, _ = _variance_stage(t, v, tau0)
    if not var_rate > 0:
        raise NumericalError(f"non-positive intensity variance estimate {var_rate}")
    return CoxModel.from_intensity_moments(mean_rate, var_rate, tau0)


def _grid(horizon: float, dt: float) -> tuple[int, float]:
    if not horizon > 0 or not dt > 0:
        raise ValueError("horizon and dt must be positive")
    n_steps = max(1, math.ceil(horizon / dt - 1e-9))
    return n_steps, horizon / n_steps


def _latent_ar(model: CoxModel, n_steps: int, dt: float, rng: np.random.Generator, n_paths: int) -> np.ndarray:
    a = math.exp(-dt / model.tau0)
    b = math.sqrt(-math.expm1(-2.0 * dt / model.tau0))
    z0 = rng.standard_normal(n_paths)
    eps = rng.standard_normal((n_paths, n_steps))
    # z[k+1] = a z[k] + b eps[k]
    rest, _ = signal.lfilter([b], [1.0, -a], eps, axis=1, zi=(a * z0)[:, None])
    return np.concatenate([z0[:, None], rest], axis=1)


def _embedding_sqrt_eigs(model: CoxModel, m: int, dt: float) -> np.ndarray:
    lags = np.arange(m) * dt
    rho = latent_correlation(np.exp(-lags / model.tau0), model.intensity_cov)
    row = np.concatenate([rho, rho[-2:0:-1]]) if m > 1 else rho
    eig = np.fft.fft(row).real
    if eig.min() < -1e-8 * eig.max():
        raise NumericalError("circulant embedding is not non-negative definite on this grid")
    return np.sqrt(np.clip(eig, 0.0, None) / row.size)


def _latent_matched(sqrt_eig: np.ndarray, m: int, rng: np.random.Generator, n_paths: int) -> np.ndarray:
    size = sqrt_eig.size
    w = rng.standard_normal((n_paths, size)) + 1j * rng.standard_normal((n_paths, size))
    return np.fft.fft(w * sqrt_eig, axis=1).real[:, :m]


def _latent_paths(model, n_steps, dt, rng, n_paths, correlation, cache):
    if correlation == "latent":
        return _latent_ar(model, n_steps, dt, rng, n_paths)
    if correlation == "intensity":
        if "sqrt_eig" not in cache:
            cache["sqrt_eig"] = _embedding_sqrt_eigs(model, n_steps + 1, dt)
        return _latent_matched(cache["sqrt_eig"], n_steps + 1, rng, n_paths)
    raise ValueError(f"unknown correlation mode {correlation!r}")


def simulate_intensity(
    model: CoxModel,
    horizon: float,
    rng: np.random.Generator,
    dt: float | None = None,
    correlation: Correlation = "latent",
) -> IntensityPath:
    """One intensity path on [0, horizon] with its trapezoid running integral.

    The step is shrunk so the grid ends exactly at ``horizon``.
    """
    n_steps, step = _grid(horizon, model.default_dt() if dt is None else dt)
    grid_t = np.arange(n_steps + 1) * step
    if model.sigma == 0:
        lam = np.full(n_steps + 1, math.exp(model.mu))
        return IntensityPath(step, lam, grid_t * math.exp(model.mu))
    z = _latent_paths(model, n_steps, step, rng, 1, correlation, {})[0]
    lam = np.exp(model.mu + model.sigma * z)
    cum = integrate.cumulative_trapezoid(lam, dx=step, initial=0.0)
    return IntensityPath(step, lam, cum)


def sample_mean_measure(
    model: CoxModel,
    t: float,
    rng: np.random.Generator,
    dt: float | None = None,
    size: int | None = None,
    correlation: Correlation = "latent",
):
    """Draw(s) of M_t, the integrated intensity over [0, t].

    Returns a float when ``size`` is None, otherwise an array of ``size``
    independent draws.
    """
    n_steps, step = _grid(t, model.default_dt() if dt is None else dt)
    n = 1 if size is None else int(size)
    if model.sigma == 0:
        out = np.full(n, t * math.exp(model.mu))
    else:
        out = np.empty(n)
        cache: dict = {}
        for lo in range(0, n, _CHUNK):
            b = min(_CHUNK, n - lo)
            z = _latent_paths(model, n_steps, step, rng, b, correlation, cache)
            lam = np.exp(model.mu + model.sigma * z)
            out[lo : lo + b] = integrate.trapezoid(lam, dx=step, axis=1)
    return float(out[0]) if size is None else out


def simulate_events(
    model: CoxModel,
    t: float,
    rng: np.random.Generator,
    dt: float | None = None,
    correlation: Correlation = "latent",
) -> np.ndarray:
    """Event times on [0, t]: a Poisson count given M_t, placed by time rescaling."""
    path = simulate_intensity(model, t, rng, dt, correlation)
    total = float(path.cumulative[-1])
    count = rng.poisson(total)
    if count == 0:
        return np.empty(0)
    u = rng.uniform(0.0, total, size=count)
    return np.sort(np.interp(u, path.cumulative, path.times))


def simulate_counts(
    model: CoxModel,
    t: float,
    rng: np.random.Generator,
    size: int,
    dt: float | None = None,
    correlation: Correlation = "latent",
) -> np.ndarray:
    """Event counts over [0, t] for ``size`` independent replicas."""
    m = sample_mean_measure(model, t, rng, dt, size, correlation)
    return rng.poisson(m)
