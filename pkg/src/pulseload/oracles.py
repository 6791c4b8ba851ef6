"""Synthetic sequences and event streams with known extremal index.

Max-autoregressive and moving-maxima constructions on unit Frechet
innovations are max-stable, so their extremal indices are exact:

* max-AR, X_i = max(a X_{i-1}, (1-a) Z_i): theta = 1 - a
* moving maxima, X_i = max_j w_j Z_{i-j}: theta = max(w) / sum(w)
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .cox import CoxModel, simulate_events
from .series import EventSeries

__all__ = [
    "SyntheticSpec",
    "gen_iid",
    "gen_max_ar",
    "gen_moving_maxima",
    "generate",
    "gen_cox_stream",
    "cluster_size_theta",
]

_MARGINALS = {
    "frechet": lambda kw: stats.invweibull(kw.pop("c", 1.0), **kw),
    "exponential": lambda kw: stats.expon(**kw),
    "normal": lambda kw: stats.norm(**kw),
    "lognormal": lambda kw: stats.lognorm(kw.pop("s", 1.0), **kw),
    "gumbel": lambda kw: stats.gumbel_r(**kw),
}


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a synthetic mark sequence.

    ``kind`` is one of ``iid``, ``max_ar`` or ``moving_maxima``; parameters:
    ``marginal`` (iid), ``a`` (max_ar), ``weights`` (moving_maxima).
    """

    kind: str
    n: int
    parameters: dict = field(default_factory=dict)

    @property
    def theta_true(self) -> float:
        if self.kind == "iid":
            return 1.0
        if self.kind == "max_ar":
            return 1.0 - float(self.parameters["a"])
        if self.kind == "moving_maxima":
            w = np.asarray(self.parameters["weights"], dtype=float)
            return float(w.max() / w.sum())
        raise ValueError(f"unknown synthetic kind {self.kind!r}")


def _unit_frechet(rng: np.random.Generator, n: int) -> np.ndarray:
    return -1.0 / np.log(rng.uniform(size=n))


def gen_iid(marginal: str, n: int, rng: np.random.Generator, **params) -> np.ndarray:
    """i.i.d. draws from a named marginal (frechet, exponential, normal, lognormal, gumbel)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    try:
        dist = _MARGINALS[marginal](dict(params))
    except KeyError:
        raise ValueError(f"unknown marginal {marginal!r}; choose from {sorted(_MARGINALS)}") from None
    return np.asarray(dist.rvs(size=n, random_state=rng), dtype=float)


def gen_max_ar(a: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Stationary max-AR(1) with unit Frechet margins; extremal index 1 - a."""
    if not 0 < a < 1:
        raise ValueError("a must lie in (0, 1)")
    z = _unit_frechet(rng, n + 1)
    x = np.empty(n)
    prev = z[0]
    for i in range(n):
        prev = max(a * prev, (1.0 - a) * z[i + 1])
        x[i] = prev
    return x


def gen_moving_maxima(weights, n: int, rng: np.random.Generator) -> np.ndarray:
    """X_i = max_j w_j Z_{i-j}; extremal index max(w) / sum(w)."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0 or np.any(w <= 0):
        raise ValueError("weights must be a non-empty sequence of positive reals")
    m = w.size - 1
    z = _unit_frechet(rng, n + m)
    x = np.full(n, -np.inf)
    for j, wj in enumerate(w):
        np.maximum(x, wj * z[m - j : m - j + n], out=x)
    return x


def generate(spec: SyntheticSpec, rng: np.random.Generator) -> np.ndarray:
    p = dict(spec.parameters)
    if spec.kind == "iid":
        marginal = p.pop("marginal", "frechet")
        return gen_iid(marginal, spec.n, rng, **p)
    if spec.kind == "max_ar":
        return gen_max_ar(float(p["a"]), spec.n, rng)
    if spec.kind == "moving_maxima":
        return gen_moving_maxima(p["weights"], spec.n, rng)
    raise ValueError(f"unknown synthetic kind {spec.kind!r}")


def gen_cox_stream(
    model: CoxModel,
    horizon: float,
    mark_spec: SyntheticSpec | None,
    rng: np.random.Generator,
    loc: float = 0.0,
    scale: float = 1.0,
    dt: float | None = None,
) -> EventSeries:
    """Cox arrival times on [0, horizon] carrying marks ``loc + scale * X``.

    ``X`` follows ``mark_spec`` (its ``n`` is ignored, the number of arrivals
    decides the length; default i.i.d. unit Frechet). Marks are positive for
    the Frechet-based kinds, so the trigger level is ``loc``.
    """
    times = simulate_events(model, horizon, rng, dt)
    n = times.size
    if mark_spec is None:
        mark_spec = SyntheticSpec("iid", n)
    if n:
        x = generate(SyntheticSpec(mark_spec.kind, n, mark_spec.parameters), rng)
    else:
        x = np.empty(0)
    marks = loc + scale * x
    trigger = min(loc, float(marks.min())) if n else loc
    return EventSeries(times, marks, trigger, horizon)


def cluster_size_theta(sequence, x: float, r: int) -> tuple[float, float]:
    """Brute-force declustering: (mean cluster size, its reciprocal).

    Walks the exceedances in order; a new cluster opens when at least r - 1
    non-exceedances separate an exceedance from the previous one.
    """
    idx = [i for i, v in enumerate(sequence) if v > x]
    if not idx:
        raise ValueError("no exceedances")
    sizes = [1]
    for prev, cur in zip(idx, idx[1:]):
        if cur - prev - 1 >= r - 1:
            sizes.append(1)
        else:
            sizes[-1] += 1
    mean_size = sum(sizes) / len(sizes)
    return mean_size, 1.0 / mean_size
