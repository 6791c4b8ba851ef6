"""Runs estimator of the extremal index and the bias-model fit across thresholds."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import DataError, NumericalError
from .series import empirical_cdf

__all__ = [
    "RunsEstimate",
    "ThetaFit",
    "runs_estimator",
    "runs_curve",
    "fit_theta",
]

_THETA_FLOOR = 1e-9


@dataclass(frozen=True)
class RunsEstimate:
    threshold: float
    r: int
    theta_hat: float
    n_exceedances: int
    n_cluster_starts: int


@dataclass(frozen=True, eq=False)
class ThetaFit:
    """theta_hat(q) ~ theta + beta1 * q**beta2, fitted by least squares."""

    theta: float
    beta1: float
    beta2: float
    sse: float
    q: np.ndarray
    theta_hat: np.ndarray

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.q.tolist(), self.theta_hat.tolist()))

    def predict(self, q):
        return self.theta + self.beta1 * np.power(q, self.beta2)


def runs_estimator(sequence, x: float, r: int) -> RunsEstimate:
    """Share of exceedances of ``x`` followed by r-1 non-exceedances.

    The look-ahead window is truncated at the end of the sequence, so a
    terminal exceedance closes its own cluster.
    """
    seq = np.asarray(sequence, dtype=float)
    n = seq.size
    if r < 2:
        raise ValueError("run length must be >= 2")
    if n < r:
        raise ValueError(f"sequence of length {n} shorter than run length {r}")
    exceed = seq > x
    n_exc = int(exceed.sum())
    if n_exc == 0:
        raise DataError(f"threshold too high: no exceedances of {x}")
    # cs[j] = number of exceedances among seq[:j]
    cs = np.concatenate(([0], np.cumsum(exceed)))
    i = np.arange(n)
    hi = np.minimum(i + r, n)
    ahead = cs[hi] - cs[i + 1]
    starts = int(np.count_nonzero(exceed & (ahead == 0)))
    return RunsEstimate(float(x), int(r), starts / n_exc, n_exc, starts)


def runs_curve(sequence, thresholds, r: int) -> tuple[np.ndarray, np.ndarray, list[RunsEstimate]]:
    """Runs estimates over a threshold ladder.

    Returns ``(q, theta_hat, estimates)`` ordered by descending exceedance
    probability q = 1 - p_hat(u). Rungs without exceedances are dropped with a
    warning.
    """
    seq = np.asarray(sequence, dtype=float)
    u = np.asarray(list(thresholds), dtype=float)
    if np.any(np.diff(u) <= 0):
        raise ValueError("thresholds must be strictly ascending")
    ests = []
    for x in u:
        try:
            ests.append(runs_estimator(seq, x, r))
        except DataError:
            warnings.warn(f"no exceedances above {x}; rung dropped", stacklevel=2)
    if not ests:
        raise DataError("no threshold in the ladder has exceedances")
    q = 1.0 - np.asarray(empirical_cdf(seq, np.array([e.threshold for e in ests])))
    th = np.array([e.theta_hat for e in ests])
    return np.atleast_1d(q), th, ests


def _inner_solve(q: np.ndarray, y: np.ndarray, beta2: float) -> tuple[float, float, float]:
    """Best (alpha, beta1) at fixed beta2 with alpha restricted to (0, 1]."""
    g = np.power(q, beta2)
    gm, ym = g.mean(), y.mean()
    sgg = float(np.sum((g - gm) ** 2))
    if sgg > 0:
        b1 = float(np.sum((g - gm) * (y - ym)) / sgg)
        a = ym - b1 * gm
    else:
        b1, a = 0.0, ym
    if not _THETA_FLOOR <= a <= 1.0:
        # convex objective: the constrained optimum sits on the violated bound
        a = min(max(a, _THETA_FLOOR), 1.0)
        gg = float(g @ g)
        b1 = float(g @ (y - a)) / gg if gg > 0 else 0.0
    res = y - a - b1 * g
    return a, b1, float(res @ res)


def fit_theta(q, theta_hat, beta2_bounds: tuple[float, float] = (0.25, 5.0), n_grid: int = 200) -> ThetaFit:
    """Least-squares fit of theta_hat = theta + beta1 * q**beta2.

    Grid search over log-spaced beta2 with a closed-form inner solve for
    (theta, beta1), then bounded scalar refinement around the best rung.

    Small beta2 turns the bias term into a slowly varying log trend in q whose
    intercept is a long extrapolation, so the default grid stops at 0.25.
    """
    q = np.asarray(q, dtype=float)
    y = np.asarray(theta_hat, dtype=float)
    if q.shape != y.shape or q.ndim != 1:
        raise ValueError("q and theta_hat must be 1-d arrays of equal length")
    if q.size < 4:
        raise DataError("need at least 4 points to fit 3 parameters")
    if np.any(q <= 0):
        raise DataError("exceedance probabilities must be positive")
    if np.ptp(q) == 0:
        raise DataError("degenerate fit: all points share the same exceedance probability")
    lo, hi = np.log(beta2_bounds[0]), np.log(beta2_bounds[1])
    grid = np.linspace(lo, hi, n_grid)
    sse = np.array([_inner_solve(q, y, np.exp(s))[2] for s in grid])
    j = int(np.argmin(sse))
    a_lo, a_hi = grid[max(j - 1, 0)], grid[min(j + 1, n_grid - 1)]
    best_s = grid[j]
    if a_hi > a_lo:
        opt = optimize.minimize_scalar(
            lambda s: _inner_solve(q, y, np.exp(s))[2],
            bounds=(a_lo, a_hi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        if opt.success and opt.fun <= sse[j]:
            best_s = float(opt.x)
    b2 = float(np.exp(best_s))
    a, b1, s = _inner_solve(q, y, b2)
    if not np.isfinite(s):
        raise NumericalError("extremal index fit did not produce a finite residual")
    return ThetaFit(float(a), b1, b2, s, q.copy(), y.copy())
