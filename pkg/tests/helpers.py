"""Shared construction helpers for the test suite."""

from __future__ import annotations

import numpy as np

from rankspec import NormalizedSpectrum, RankSpectrum, build_spectrum


def spectrum_from_counts(counts) -> RankSpectrum:
    """Distinct synthetic labels so duplicate checks never interfere."""
    return build_spectrum([(f"w{i:05d}", int(c)) for i, c in enumerate(counts)])


def random_spectrum(rng: np.random.Generator, n: int | None = None,
                    max_count: int = 500) -> RankSpectrum:
    if n is None:
        n = int(rng.integers(1, 60))
    counts = rng.integers(1, max_count + 1, size=n)
    return spectrum_from_counts(counts)


def normalized_from_values(values) -> NormalizedSpectrum:
    """Build a NormalizedSpectrum from raw positive non-increasing values,
    dividing by their sum."""
    arr = np.asarray(values, dtype=float)
    arr = arr / arr.sum()
    return NormalizedSpectrum(tuple(float(v) for v in arr), len(values))


def gini_mean_absolute_difference(counts) -> float:
    """Brute-force oracle: G = sum_ij |x_i - x_j| / (2 n^2 mean)."""
    x = np.asarray(counts, dtype=float)
    n = x.size
    total = np.abs(x[:, None] - x[None, :]).sum()
    return float(total / (2.0 * n * n * x.mean()))


def lorenz_area_gini(points) -> float:
    """Twice the area between the diagonal and the Lorenz curve, by trapezoids."""
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return 1.0 - 2.0 * area
