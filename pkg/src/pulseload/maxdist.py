"""Distribution of the maximum load over a time horizon.

The maximum of the associated i.i.d. sequence over t hours is estimated by
Monte Carlo over the random mean measure and the posterior of the parent
CDF, fitted with a Gumbel law on probability paper, and then shifted for
dependence (extremal index) and scaled to longer horizons by max-stability.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from .bayes import BetaPosterior
from .cox import Correlation, CoxModel, sample_mean_measure
from .errors import DataError, NumericalError

__all__ = [
    "EULER_GAMMA",
    "GumbelModel",
    "FrechetModel",
    "MaxCdfPoint",
    "conditional_max_cdf",
    "mc_max_cdf",
    "mc_max_cdf_curve",
    "gumbel_fit",
    "frechet_fit",
    "reduced_variate_sse",
    "apply_extremal_index",
    "horizon_scale",
    "gumbel_summary",
    "horizon_table",
]

EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class GumbelModel:
    """F(x) = exp(-exp(-alpha (x - mode)))."""

    alpha: float
    mode: float
    horizon_days: float = 1.0
    theta: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("Gumbel scale parameter alpha must be positive")
        if not self.horizon_days > 0:
            raise ValueError("horizon must be positive")
        if not 0 < self.theta <= 1:
            raise ValueError("theta must lie in (0, 1]")

    def cdf(self, x):
        return np.exp(-np.exp(-self.alpha * (np.asarray(x, dtype=float) - self.mode)))

    def reduced_variate(self, x):
        return self.alpha * (np.asarray(x, dtype=float) - self.mode)

    def ppf(self, prob):
        return self.mode - np.log(-np.log(prob)) / self.alpha

    @property
    def mean(self) -> float:
        return self.mode + EULER_GAMMA / self.alpha

    @property
    def std(self) -> float:
        return math.pi / (self.alpha * math.sqrt(6.0))


@dataclass(frozen=True)
class FrechetModel:
    """F(x) = exp(-(x / scale) ** -shape), x > 0."""

    shape: float
    scale: float

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(x > 0, np.exp(-np.power(np.maximum(x, 1e-300) / self.scale, -self.shape)), 0.0)

    def reduced_variate(self, x):
        return self.shape * (np.log(np.asarray(x, dtype=float)) - math.log(self.scale))


@dataclass(frozen=True)
class MaxCdfPoint:
    level: float
    cdf: float
    mc_std_error: float


def conditional_max_cdf(p, m_t):
    """P[max <= x | M_t = m_t] = exp(-m_t (1 - p)) with p = F(x)."""
    return np.exp(-np.asarray(m_t, dtype=float) * (1.0 - np.asarray(p, dtype=float)))


def _point(level: float, values: np.ndarray) -> MaxCdfPoint:
    n = values.size
    se = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return MaxCdfPoint(float(level), float(values.mean()), se)


def mc_max_cdf(
    cox: CoxModel,
    post: BetaPosterior | float,
    t: float,
    rng: np.random.Generator,
    n_sims: int = 100_000,
    level: float = float("nan"),
    dt: float | None = None,
    correlation: Correlation = "latent",
) -> MaxCdfPoint:
    """Monte Carlo CDF of the t-hour maximum of the associated i.i.d. sequence.

    Averages exp(-m (1 - p)) over independent draws of the mean measure m and
    of the parent-CDF value p from its posterior. A float ``post`` is taken as
    a point mass at that probability.
    """
    if n_sims < 1000:
        raise ValueError("n_sims must be >= 1000")
    m = sample_mean_measure(cox, t, rng, dt, n_sims, correlation)
    if isinstance(post, BetaPosterior):
        p = rng.beta(post.alpha1, post.alpha2, size=n_sims)
    else:
        p = np.full(n_sims, float(post))
    return _point(level, conditional_max_cdf(p, m))


def mc_max_cdf_curve(
    cox: CoxModel,
    levels,
    posteriors,
    t: float,
    rng: np.random.Generator,
    n_sims: int = 100_000,
    dt: float | None = None,
    correlation: Correlation = "latent",
    common_random_numbers: bool = False,
) -> list[MaxCdfPoint]:
    """:func:`mc_max_cdf` over several levels.

    By default each level gets its own independent draws. With
    ``common_random_numbers`` one set of mean-measure draws and one set of
    uniforms (mapped through each posterior's quantile function) is shared,
    so the estimated curve is monotone whenever the posteriors are
    stochastically ordered.
    """
    levels = list(levels)
    posteriors = list(posteriors)
    if len(levels) != len(posteriors):
        raise ValueError("levels and posteriors differ in length")
    if not common_random_numbers:
        return [mc_max_cdf(cox, p, t, rng, n_sims, lv, dt, correlation) for lv, p in zip(levels, posteriors)]
    if n_sims < 1000:
        raise ValueError("n_sims must be >= 1000")
    m = sample_mean_measure(cox, t, rng, dt, n_sims, correlation)
    u = rng.uniform(size=n_sims)
    out = []
    for lv, post in zip(levels, posteriors):
        if isinstance(post, BetaPosterior):
            p = stats.beta.ppf(u, post.alpha1, post.alpha2)
        else:
            p = np.full(n_sims, float(post))
        out.append(_point(lv, conditional_max_cdf(p, m)))
    return out


def _probability_plot_points(points) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray([(float(a), float(b)) for a, b in points])
    if arr.ndim != 2 or arr.shape[0] < 2:
        raise DataError("need at least 2 (level, cdf) points")
    x, f = arr[:, 0], arr[:, 1]
    if np.any((f <= 0) | (f >= 1)):
        raise DataError("cdf values must lie strictly inside (0, 1)")
    return x, -np.log(-np.log(f))


def gumbel_fit(points, horizon_days: float = 1.0) -> GumbelModel:
    """OLS line through Gumbel probability-paper coordinates (level, -ln(-ln F))."""
    x, y = _probability_plot_points(points)
    if np.ptp(x) == 0:
        raise DataError("all levels identical")
    slope, intercept = np.polyfit(x, y, 1)
    if not slope > 0:
        raise NumericalError(f"non-positive Gumbel slope {slope}: data do not look like maxima")
    return GumbelModel(float(slope), float(-intercept / slope), horizon_days)


def frechet_fit(points) -> tuple[FrechetModel, float]:
    """OLS in (ln level, -ln(-ln F)); returns the model and its reduced-variate SSE."""
    x, y = _probability_plot_points(points)
    if np.any(x <= 0):
        raise DataError("Frechet fit needs positive levels")
    lx = np.log(x)
    if np.ptp(lx) == 0:
        raise DataError("all levels identical")
    slope, intercept = np.polyfit(lx, y, 1)
    if not slope > 0:
        raise NumericalError(f"non-positive Frechet shape {slope}")
    model = FrechetModel(float(slope), float(math.exp(-intercept / slope)))
    return model, reduced_variate_sse(model, points)


def reduced_variate_sse(model, points) -> float:
    """Residual sum of squares of a fitted model on probability paper."""
    x, y = _probability_plot_points(points)
    r = y - model.reduced_variate(x)
    return float(r @ r)


def apply_extremal_index(model: GumbelModel, theta: float) -> GumbelModel:
    """Raise the CDF to the power theta: same alpha, mode moved left by ln(1/theta)/alpha."""
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    if model.theta != 1.0:
        raise ValueError("model already carries an extremal index adjustment")
    return replace(model, mode=model.mode - math.log(1.0 / theta) / model.alpha, theta=float(theta))


def horizon_scale(model: GumbelModel, r_days: float) -> GumbelModel:
    """Daily-maximum model raised to the power r: mode moved right by ln(r)/alpha."""
    if r_days < 1:
        raise ValueError("horizon multiple must be >= 1 day")
    if model.horizon_days != 1.0:
        raise ValueError("horizon scaling starts from a 1-day model")
    return replace(model, mode=model.mode + math.log(r_days) / model.alpha, horizon_days=float(r_days))


def gumbel_summary(model: GumbelModel) -> tuple[float, float]:
    """(mean, coefficient of variation)."""
    mean = model.mean
    if not mean > 0:
        raise NumericalError(f"coefficient of variation undefined for mean {mean}")
    return mean, model.std / mean


def horizon_table(daily: GumbelModel, horizons_days, thetas) -> list[dict]:
    """Mean and c.o.v. of the maximum for each (horizon, theta) pair."""
    rows = []
    for r in horizons_days:
        for th in thetas:
            m = horizon_scale(apply_extremal_index(daily, th), r)
            mean, cov = gumbel_summary(m)
            rows.append(
                {"horizon_days": float(r), "theta": float(th), "alpha": m.alpha, "mode": m.mode, "mean": mean, "cov": cov}
            )
    return rows
