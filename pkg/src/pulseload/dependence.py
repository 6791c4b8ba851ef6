"""Autocorrelation, variance function and scale of fluctuation of a load sequence.

The randomly timed peak sequence is treated as if sampled at unit spacing, so
lags and windows are counted in events (or in blocks for block-maxima series).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError

__all__ = [
    "Acf",
    "ScaleOfFluctuation",
    "autocorrelation",
    "variance_function",
    "scale_of_fluctuation",
    "run_length",
]


@dataclass(frozen=True, eq=False)
class Acf:
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or v.size < 1 or v[0] != 1.0:
            raise ValueError("ACF must be a 1-d array starting with rho(0) = 1")
        if np.any(np.abs(v) > 1 + 1e-12):
            raise ValueError("|rho(k)| must not exceed 1")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def max_lag(self) -> int:
        return self.values.size - 1

    @classmethod
    def geometric(cls, phi: float, max_lag: int) -> "Acf":
        """Exact AR(1) autocorrelation phi**k."""
        return cls(float(phi) ** np.arange(max_lag + 1))


@dataclass(frozen=True, eq=False)
class ScaleOfFluctuation:
    windows: np.ndarray
    estimates: np.ndarray

    @property
    def converged_value(self) -> float:
        return float(self.estimates[-1])

    @property
    def tau_c_by_window(self) -> list[tuple[int, float]]:
        return [(int(w), float(e)) for w, e in zip(self.windows, self.estimates)]


def autocorrelation(x, max_lag: int) -> Acf:
    """Sample ACF with the biased (full-sample) normalization."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if not 1 <= max_lag < n:
        raise ValueError(f"need 1 <= max_lag < len(sequence), got max_lag={max_lag}, n={n}")
    d = x - x.mean()
    denom = float(d @ d)
    if denom <= 0.0 or not math.isfinite(denom):
        raise DataError("autocorrelation of a constant sequence is undefined")
    rho = np.empty(max_lag + 1)
    rho[0] = 1.0
    for k in range(1, max_lag + 1):
        rho[k] = float(d[:-k] @ d[k:]) / denom
    return Acf(rho)


def _scaled_variance(rho: np.ndarray, T: int) -> float:
    # T * gamma(T) = 1 + 2 sum_{k=1}^{T-1} (1 - k/T) rho(k)
    k = np.arange(1, T)
    return 1.0 + 2.0 * float(np.sum((1.0 - k / T) * rho[1:T]))


def variance_function(acf: Acf, T: int) -> float:
    """Variance of the window-T local average relative to the point variance."""
    if not 1 <= T <= acf.max_lag + 1:
        raise ValueError(f"window {T} outside 1..{acf.max_lag + 1}")
    return _scaled_variance(acf.values, int(T)) / T


def scale_of_fluctuation(acf: Acf, windows) -> ScaleOfFluctuation:
    """T * gamma(T) over a set of windows; the largest window gives the plateau value."""
    w = np.unique(np.asarray(list(windows), dtype=int))
    if w.size == 0:
        raise ValueError("no windows given")
    if w[0] < 1 or w[-1] > acf.max_lag + 1:
        raise ValueError(f"windows must lie in 1..{acf.max_lag + 1}")
    est = np.array([_scaled_variance(acf.values, int(T)) for T in w])
    return ScaleOfFluctuation(w, est)


def run_length(tau_c: float) -> int:
    """Integer run length, round half up, never below 2."""
    if not tau_c > 0:
        raise ValueError("scale of fluctuation must be positive")
    return max(2, int(math.floor(tau_c + 0.5)))
