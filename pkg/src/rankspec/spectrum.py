"""Ranked count spectra and their descriptive / inequality statistics.

A spectrum is a list of labelled positive counts sorted so that rank 1
carries the largest count.  All types are immutable and all operations are
pure, so concurrent readers need no coordination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class RankSpectrum:
    """Labelled counts, non-increasing in rank, every count >= 1."""

    entries: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if not self.entries:
            raise DataError("spectrum must contain at least one entry")
        prev = None
        for label, count in self.entries:
            if count < 1:
                raise DataError(f"non-positive count {count} for label {label!r}")
            if prev is not None and count > prev:
                raise DataError("counts must be non-increasing in rank")
            prev = count

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.entries)

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(count for _, count in self.entries)

    @property
    def total(self) -> int:
        return sum(count for _, count in self.entries)

    def counts_array(self) -> np.ndarray:
        return np.array([count for _, count in self.entries], dtype=np.int64)


@dataclass(frozen=True)
class NormalizedSpectrum:
    """Probability-mass view of a spectrum: positive, non-increasing, sums to 1."""

    values: tuple[float, ...]
    source_n: int

    def __post_init__(self):
        if self.source_n != len(self.values) or self.source_n < 1:
            raise DataError("source_n must equal the number of values")
        arr = np.asarray(self.values, dtype=float)
        if (arr <= 0).any():
            raise DataError("normalized values must be positive")
        if (np.diff(arr) > 0).any():
            raise DataError("normalized values must be non-increasing")
        if abs(float(arr.sum()) - 1.0) > 1e-12:
            raise DataError("normalized values must sum to 1 within 1e-12")

    @property
    def n(self) -> int:
        return self.source_n

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class SpectrumStats:
    """Descriptive summary of a RankSpectrum."""

    total_characters: int
    n_syllables: int
    mean: float
    median: float
    sd: float
    mad: float
    coverage_mean_sd: float
    coverage_median_mad: float
    singleton_count: int


@dataclass(frozen=True)
class LorenzCurve:
    """Cumulative (share of items, share of mass) points from (0,0) to (1,1)."""

    points: tuple[tuple[float, float], ...]


def build_spectrum(pairs) -> RankSpectrum:
    """Rank (label, count) pairs by descending count; ties by ascending label."""
    items = [(str(label), int(count)) for label, count in pairs]
    if not items:
        raise DataError("no entries to rank")
    seen = set()
    for label, count in items:
        if count < 1:
            raise DataError(f"non-positive count {count} for label {label!r}")
        if label in seen:
            raise DataError(f"duplicate label {label!r}")
        seen.add(label)
    items.sort(key=lambda item: (-item[1], item[0]))
    return RankSpectrum(tuple(items))


def normalize(s: RankSpectrum) -> NormalizedSpectrum:
    """Divide each count by the grand total."""
    counts = s.counts_array()
    values = counts / float(counts.sum())
    return NormalizedSpectrum(tuple(float(v) for v in values), s.n)


def descriptive_stats(s: RankSpectrum) -> SpectrumStats:
    """Mean, median, sample SD, unscaled MAD, coverages, and singleton count.

    The mean is the exact ratio total/n.  Coverage intervals are closed on
    both ends; the mean-SD interval's lower bound is clipped at zero.
    """
    counts = s.counts_array()
    n = s.n
    total = int(counts.sum())
    mean = total / n
    median = float(np.median(counts))
    sd = float(np.std(counts, ddof=1)) if n > 1 else 0.0
    mad = float(np.median(np.abs(counts - median)))
    lo = max(0.0, mean - sd)
    hi = mean + sd
    coverage_mean_sd = float(((counts >= lo) & (counts <= hi)).mean())
    coverage_median_mad = float(
        ((counts >= median - mad) & (counts <= median + mad)).mean()
    )
    singleton_count = int((counts == 1).sum())
    return SpectrumStats(
        total_characters=total,
        n_syllables=n,
        mean=mean,
        median=median,
        sd=sd,
        mad=mad,
        coverage_mean_sd=coverage_mean_sd,
        coverage_median_mad=coverage_median_mad,
        singleton_count=singleton_count,
    )


def top_share(s: RankSpectrum, fraction: float) -> float:
    """Share of total mass held by the top round(n*fraction) ranks (at least 1)."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    counts = s.counts_array()
    # round half up so k is reproducible regardless of banker's rounding
    k = max(1, int(np.floor(s.n * fraction + 0.5)))
    k = min(k, s.n)
    return float(counts[:k].sum() / counts.sum())


def gini(s: RankSpectrum) -> float:
    """Gini coefficient of the counts.

    Uses the rank-weighted formula G = (n + 1 - 2 * sum((n+1-i) x_i) / sum(x_i)) / n
    applied to ascending-sorted values; equals twice the area between the
    Lorenz curve and the diagonal.
    """
    x = np.sort(s.counts_array())
    n = x.size
    i = np.arange(1, n + 1, dtype=np.int64)
    weighted = int(((n + 1 - i) * x).sum())
    return float((n + 1 - 2 * (weighted / int(x.sum()))) / n)


def lorenz_curve(s: RankSpectrum) -> LorenzCurve:
    """Lorenz curve with mass accumulated from the smallest counts upward."""
    x = np.sort(s.counts_array())
    n = x.size
    cum = np.cumsum(x) / float(x.sum())
    points = [(0.0, 0.0)]
    points.extend((float((i + 1) / n), float(cum[i])) for i in range(n))
    return LorenzCurve(tuple(points))


def histogram(s: RankSpectrum, bin_width: int = 1) -> list[tuple[int, int]]:
    """Tally counts into bins [k*w+1, (k+1)*w]; returns (bin_start, item count).

    Bins are contiguous from the bin holding the smallest count to the one
    holding the largest, so interior empty bins are reported as zero.
    """
    if bin_width < 1:
        raise ValueError("bin_width must be >= 1")
    counts = s.counts_array()
    idx = (counts - 1) // bin_width
    k_min, k_max = int(idx.min()), int(idx.max())
    tallies = np.bincount(idx - k_min, minlength=k_max - k_min + 1)
    return [
        (int((k_min + j) * bin_width + 1), int(tallies[j]))
        for j in range(k_max - k_min + 1)
    ]
