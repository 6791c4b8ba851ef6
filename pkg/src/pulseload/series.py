"""Marked pulse-load event series: ingestion, filtering and basic diagnostics.

An event series is the record of a threshold-triggered monitoring device:
one row per loading event, holding the event time (hours since the start of
observation) and the peak load effect during the event.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import special

from .errors import DataError

__all__ = [
    "EventRecord",
    "EventSeries",
    "BlockMaximaSeries",
    "ChiSquaredResult",
    "load_events",
    "write_events",
    "filter_above",
    "interarrival_times",
    "chi_squared_exponential_test",
    "chi_squared_significance",
    "block_maxima",
    "empirical_cdf",
    "summarize",
]

CSV_HEADER = ("time_hours", "peak")


@dataclass(frozen=True)
class EventRecord:
    time: float
    magnitude: float


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class EventSeries:
    """Time-ordered (time, magnitude) pairs above a trigger level.

    Parameters
    ----------
    times : array_like
        Event times in hours, strictly increasing, non-negative.
    magnitudes : array_like
        Peak magnitudes, all finite and >= ``trigger_level``.
    trigger_level : float
        Recording threshold of the device.
    observation_span : float, optional
        Length of the observation window in hours. Defaults to the last
        event time.
    """

    times: np.ndarray
    magnitudes: np.ndarray
    trigger_level: float
    observation_span: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        times = _frozen(self.times)
        mags = _frozen(self.magnitudes)
        if times.ndim != 1 or times.shape != mags.shape:
            raise DataError("times and magnitudes must be 1-d arrays of equal length")
        if not np.all(np.isfinite(times)) or np.any(times < 0):
            raise DataError("event times must be finite and non-negative")
        if not np.all(np.isfinite(mags)):
            raise DataError("magnitudes must be finite")
        if times.size > 1 and np.any(np.diff(times) <= 0):
            raise DataError("event times must be strictly increasing")
        if np.any(mags < self.trigger_level):
            raise DataError("magnitude below trigger level")
        span = self.observation_span
        last = float(times[-1]) if times.size else 0.0
        if span is None:
            span = last
        if span < last:
            raise DataError(f"observation span {span} ends before last event at {last}")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "magnitudes", mags)
        object.__setattr__(self, "trigger_level", float(self.trigger_level))
        object.__setattr__(self, "observation_span", float(span))

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def records(self) -> list[EventRecord]:
        return [EventRecord(float(t), float(m)) for t, m in zip(self.times, self.magnitudes)]

    @property
    def mean_rate(self) -> float:
        """Events per hour over the observation span."""
        if self.observation_span <= 0:
            raise DataError("observation span is zero")
        return len(self) / self.observation_span


@dataclass(frozen=True, eq=False)
class BlockMaximaSeries:
    """Maxima over successive disjoint blocks; empty blocks hold NaN."""

    block_length: float
    values: np.ndarray

    @property
    def count(self) -> int:
        return int(self.values.size)

    @property
    def empty(self) -> np.ndarray:
        return np.isnan(self.values)

    def nonempty_values(self) -> np.ndarray:
        return self.values[~self.empty]


@dataclass(frozen=True)
class ChiSquaredResult:
    statistic: float
    degrees_of_freedom: int
    significance: float
    n_bins: int


def load_events(
    path,
    trigger_level: float | None = None,
    observation_span: float | None = None,
    time_column: str = CSV_HEADER[0],
    magnitude_column: str = CSV_HEADER[1],
    delimiter: str = ",",
) -> EventSeries:
    """Read an event CSV (header ``time_hours,peak``).

    Unsorted rows are sorted with a warning; duplicate timestamps and
    unparseable rows raise :class:`DataError`. When ``trigger_level`` is not
    given the smallest recorded magnitude is used.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"input file not found: {path}")
    times, mags = [], []
    with path.open(newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        try:
            ti = header.index(time_column)
            mi = header.index(magnitude_column)
        except ValueError:
            raise DataError(
                f"{path}: header must contain {time_column!r} and {magnitude_column!r}, got {header}"
            ) from None
        for row_no, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                t = float(row[ti])
                m = float(row[mi])
            except (ValueError, IndexError):
                raise DataError(f"{path}: cannot parse data row {row_no}: {row!r}") from None
            if not (math.isfinite(t) and math.isfinite(m)):
                raise DataError(f"{path}: non-finite value in data row {row_no}")
            times.append(t)
            mags.append(m)
    if not times:
        raise DataError(f"{path}: no events")
    times_a = np.asarray(times)
    mags_a = np.asarray(mags)
    if np.any(np.diff(times_a) < 0):
        warnings.warn(f"{path}: rows not in time order; sorting", stacklevel=2)
        order = np.argsort(times_a, kind="stable")
        times_a, mags_a = times_a[order], mags_a[order]
    dup = np.flatnonzero(np.diff(times_a) == 0)
    if dup.size:
        raise DataError(f"{path}: duplicate timestamp {times_a[dup[0]]} h")
    if trigger_level is None:
        trigger_level = float(mags_a.min())
    elif np.any(mags_a < trigger_level):
        raise DataError(f"{path}: magnitude {mags_a.min()} below trigger level {trigger_level}")
    return EventSeries(times_a, mags_a, trigger_level, observation_span)


def write_events(series: EventSeries, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for t, m in zip(series.times, series.magnitudes):
            writer.writerow([repr(float(t)), repr(float(m))])


def filter_above(series: EventSeries, u: float) -> EventSeries:
    """Keep only events with magnitude strictly above ``u``."""
    if u < series.trigger_level:
        raise DataError(f"threshold {u} is below the trigger level {series.trigger_level}")
    keep = series.magnitudes > u
    return EventSeries(series.times[keep], series.magnitudes[keep], u, series.observation_span)


def interarrival_times(series: EventSeries) -> np.ndarray:
    if len(series) < 2:
        raise DataError("need at least 2 events for interarrival times")
    return np.diff(series.times)


def _merge_from_right(expected: np.ndarray, min_expected: float) -> list[tuple[int, int]]:
    """Group adjacent bins, scanning from the tail, so each group's expectation >= min_expected."""
    groups: list[tuple[int, int]] = []
    hi = len(expected)
    acc = 0.0
    for i in range(len(expected) - 1, -1, -1):
        acc += expected[i]
        if acc >= min_expected:
            groups.append((i, hi))
            hi = i
            acc = 0.0
    if hi > 0:
        if groups:
            lo, top = groups.pop()
            groups.append((0, top))
        else:
            groups.append((0, hi))
    return groups[::-1]


def chi_squared_exponential_test(
    durations, n_bins: int = 10, min_expected: float = 5.0
) -> ChiSquaredResult:
    """Pearson chi-squared goodness of fit of durations to an exponential law.

    The rate is estimated as 1/mean, bins are equiprobable under the fitted
    law and merged from the right until every expected count reaches
    ``min_expected``. One degree of freedom is spent on the rate.
    """
    x = np.asarray(durations, dtype=float)
    if n_bins < 3:
        raise ValueError("n_bins must be >= 3")
    if x.size == 0 or np.any(x < 0) or not np.all(np.isfinite(x)):
        raise DataError("durations must be finite and non-negative")
    mean = x.mean()
    if mean <= 0:
        raise DataError("degenerate durations (all zero)")
    n = x.size
    probs = np.full(n_bins, 1.0 / n_bins)
    edges = -mean * np.log1p(-np.arange(1, n_bins) / n_bins)
    observed = np.bincount(np.searchsorted(edges, x, side="right"), minlength=n_bins)
    expected = n * probs
    groups = _merge_from_right(expected, min_expected)
    obs_g = np.array([observed[a:b].sum() for a, b in groups], dtype=float)
    exp_g = np.array([expected[a:b].sum() for a, b in groups])
    k = len(groups)
    dof = k - 2
    if dof < 1:
        raise DataError(f"too few durations ({n}) for a chi-squared test with expected counts >= {min_expected}")
    stat = float(np.sum((obs_g - exp_g) ** 2 / exp_g))
    return ChiSquaredResult(stat, dof, chi_squared_significance(stat, dof), k)


def chi_squared_significance(statistic: float, dof: int) -> float:
    """Upper-tail probability of the chi-squared law, Q(dof/2, statistic/2)."""
    if dof < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if statistic < 0:
        raise ValueError("statistic must be non-negative")
    return float(special.gammaincc(dof / 2.0, statistic / 2.0))


def block_maxima(series: EventSeries, dt: float) -> BlockMaximaSeries:
    """Maxima over blocks ((i-1)dt, i dt], i = 1 .. floor(span/dt) + 1.

    An event at exactly t = 0 is assigned to the first block.
    """
    if not dt > 0:
        raise ValueError("block length must be positive")
    count = int(math.floor(series.observation_span / dt)) + 1
    values = np.full(count, np.nan)
    if len(series):
        idx = np.ceil(series.times / dt).astype(int) - 1
        idx = np.clip(idx, 0, count - 1)
        np.fmax.at(values, idx, series.magnitudes)
    return BlockMaximaSeries(float(dt), values)


def empirical_cdf(magnitudes, level):
    """Point estimate of the parent CDF: #(L_k <= level) / (n + 1).

    ``level`` may be a scalar or an array; the output has the same shape.
    """
    x = np.sort(np.asarray(magnitudes, dtype=float))
    if x.size == 0:
        raise DataError("empirical CDF of an empty sample")
    counts = np.searchsorted(x, level, side="right")
    out = counts / (x.size + 1.0)
    return float(out) if np.ndim(out) == 0 else out


def summarize(series: EventSeries, n_bins: int = 10) -> dict:
    """JSON-ready ingest summary with the interarrival exponential test."""
    out = {
        "n": len(series),
        "span_hours": series.observation_span,
        "trigger": series.trigger_level,
        "mean_interarrival_hours": None,
        "chi2": None,
        "dof": None,
        "significance": None,
    }
    if len(series) >= 2:
        d = interarrival_times(series)
        out["mean_interarrival_hours"] = float(d.mean())
        try:
            res = chi_squared_exponential_test(d, n_bins)
        except DataError:
            return out
        out.update(chi2=res.statistic, dof=res.degrees_of_freedom, significance=res.significance)
    return out
