"""Beta posterior for the unknown parent-CDF value at a fixed level.

Under a uniform prior, the order-statistics likelihood of a dependent
stationary sequence yields a Beta posterior whose second parameter is damped
by the extremal index, so dependence widens the posterior without moving
its mean much.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import special

from .errors import DataError

__all__ = [
    "BetaPosterior",
    "posterior_params",
    "posterior_moments",
    "order_statistic_cdf",
    "sample_posterior",
]


@dataclass(frozen=True)
class BetaPosterior:
    alpha1: float
    alpha2: float
    n: int
    k: int
    theta: float

    def __post_init__(self):
        if not (self.alpha1 > 0 and self.alpha2 > 0):
            raise ValueError("Beta parameters must be positive")

    @property
    def mean(self) -> float:
        return self.alpha1 / (self.alpha1 + self.alpha2)

    @property
    def variance(self) -> float:
        s = self.alpha1 + self.alpha2
        return self.alpha1 * self.alpha2 / (s * s * (s + 1.0))

    @property
    def cov(self) -> float:
        return math.sqrt(self.variance) / self.mean


def posterior_params(
    n: int,
    p_hat: float,
    theta: float = 1.0,
    variant: Literal["tail_only", "likelihood"] = "tail_only",
) -> BetaPosterior:
    """Posterior Beta(alpha1, alpha2) for P = F(l) given n observations.

    ``k = round((n + 1) * p_hat)`` recovers the count of observations at or
    below the level (published p_hat values are themselves rounded).

    ``variant="tail_only"`` gives alpha1 = k + 1, alpha2 = (n - k) theta + 1.
    ``variant="likelihood"`` also damps the first exponent,
    alpha1 = (k + 1) theta + 1, which is what the approximate likelihood
    p**((k+1) theta) (1-p)**((n-k) theta) implies under a uniform prior.
    The two differ even at theta = 1 (alpha1 = k + 2 there). Only the
    likelihood variant has a variance that falls as theta grows; with the
    tail-only form and k > n/2 a smaller theta narrows the posterior.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= p_hat <= 1.0:
        raise ValueError("p_hat must lie in [0, 1]")
    if not 0.0 < theta <= 1.0:
        raise ValueError("theta must lie in (0, 1]")
    k = int(math.floor((n + 1) * p_hat + 0.5))
    if k > n:
        raise DataError(f"inconsistent p_hat={p_hat}: implies k={k} > n={n}")
    if variant == "tail_only":
        a1 = k + 1.0
    elif variant == "likelihood":
        a1 = (k + 1.0) * theta + 1.0
    else:
        raise ValueError(f"unknown variant {variant!r}")
    a2 = (n - k) * theta + 1.0
    return BetaPosterior(a1, a2, int(n), k, float(theta))


def posterior_moments(post: BetaPosterior) -> tuple[float, float]:
    """(mean, coefficient of variation) of the posterior."""
    return post.mean, post.cov


def order_statistic_cdf(i: int, n: int, theta: float, p: float) -> float:
    """P[i-th largest of n <= x] where F(x) = p, via the Poisson limit.

    tau = theta (n - i + 1)(1 - p); the result is the Poisson(tau) CDF at i - 1.
    """
    if not 1 <= i <= n:
        raise ValueError("rank must satisfy 1 <= i <= n")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    tau = theta * (n - i + 1) * (1.0 - p)
    if tau == 0.0:
        return 1.0
    # regularized upper incomplete gamma Q(i, tau) equals the Poisson partial sum
    return float(special.gammaincc(i, tau))


def sample_posterior(post: BetaPosterior, rng: np.random.Generator, size=None):
    return rng.beta(post.alpha1, post.alpha2, size=size)
