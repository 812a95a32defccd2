"""Poisson replicate generation and the empirical p-value for the
piecewise-log versus Beta comparison.

Each replicate redraws every observed count from a Poisson distribution with
that count as its mean, drops zeros, and re-ranks.  Replicate i always uses
a child generator derived from (master seed, i), so results are a pure
function of (spectrum, replicates, seed) no matter how many workers run.
"""

from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass

import numpy as np

from .errors import FitError
from .fit import FitOrder, beta_init, fit_beta, scan_breakpoint
from .spectrum import RankSpectrum, build_spectrum, normalize

# inversion by sequential search below this mean, transformed rejection above
_PTRS_THRESHOLD = 30.0


def poisson_sample(lam: float, rng: np.random.Generator) -> int:
    """One Poisson draw using only uniform variates from rng."""
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    if lam == 0:
        return 0
    if lam < _PTRS_THRESHOLD:
        return _poisson_inversion(lam, rng)
    return _poisson_ptrs(lam, rng)


def _poisson_inversion(lam: float, rng: np.random.Generator) -> int:
    # walk the CDF; the cap guards against float saturation of the partial sum
    cap = int(lam + 60.0 * math.sqrt(lam) + 100.0)
    x = 0
    p = math.exp(-lam)
    total = p
    u = rng.random()
    while u > total and x < cap:
        x += 1
        p *= lam / x
        total += p
    return x


def _poisson_ptrs(lam: float, rng: np.random.Generator) -> int:
    # Hormann's transformed rejection with squeeze (PTRS)
    slam = math.sqrt(lam)
    loglam = math.log(lam)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2.0)
    while True:
        u = rng.random() - 0.5
        v = rng.random()
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + lam + 0.43)
        if us >= 0.07 and v <= vr:
            return int(k)
        if k < 0 or (us < 0.013 and v > us):
            continue
        if (
            math.log(v) + math.log(invalpha) - math.log(a / (us * us) + b)
            <= -lam + k * loglam - math.lgamma(k + 1.0)
        ):
            return int(k)


def make_replicate(s: RankSpectrum, rng: np.random.Generator) -> RankSpectrum:
    """Poisson-redraw every count, drop zeros, re-rank.

    An all-zero draw is rejected and redrawn with the advanced generator, so
    the result is never empty.
    """
    replicate, _ = replicate_with_redraws(s, rng)
    return replicate


def replicate_with_redraws(
    s: RankSpectrum, rng: np.random.Generator
) -> tuple[RankSpectrum, int]:
    """make_replicate plus the number of all-zero draws that were rejected."""
    redraws = 0
    while True:
        pairs = []
        for label, count in s.entries:
            draw = poisson_sample(count, rng)
            if draw > 0:
                pairs.append((label, draw))
        if pairs:
            return build_spectrum(pairs), redraws
        redraws += 1


def comparison_statistic(n_effective: int, sse_plog: float, sse_beta: float) -> float:
    """n * ln(SSE_plog / SSE_beta); positive means the Beta function won."""
    if sse_plog <= 0 or sse_beta <= 0:
        raise FitError("comparison statistic undefined for non-positive SSE")
    return n_effective * math.log(sse_plog / sse_beta)


@dataclass(frozen=True)
class ReplicateReport:
    """Fit outcome of one replicate."""

    replicate_index: int
    n_effective: int
    sse_beta: float
    sse_plog: float
    statistic: float


def replicate_statistic(rep: RankSpectrum, index: int = 0) -> ReplicateReport:
    """Fit both competing models to a replicate and form the comparison statistic.

    The Beta fit starts from the linearized estimate; the piecewise fit is
    continuous, fits the high-ranking segment first, and scans breakpoints
    over [2, floor(n/5)].
    """
    n_eff = rep.n
    if n_eff < 10:
        raise ValueError("replicate has fewer than 10 surviving entries")
    y = normalize(rep)
    beta = fit_beta(y, beta_init(y))
    plog = scan_breakpoint(
        y, 2, n_eff // 5, continuous=True, fit_order=FitOrder.HIGH_FIRST
    )
    stat = comparison_statistic(n_eff, plog.sse, beta.sse)
    if not math.isfinite(stat):
        raise FitError("comparison statistic is not finite")
    return ReplicateReport(
        replicate_index=index,
        n_effective=n_eff,
        sse_beta=beta.sse,
        sse_plog=plog.sse,
        statistic=stat,
    )


@dataclass(frozen=True)
class PValueReport:
    """Aggregate of a replicate run.

    p_value counts strictly positive statistics over all requested
    replicates.  Replicates whose fits fail are excluded from statistics and
    counted in flagged.  The margin fractions report how often the statistic
    cleared the AIC (-2) and BIC (-ln n) parameter penalties.
    """

    replicates: int
    p_value: float
    statistics: tuple[float, ...]
    seed: int
    histogram: tuple[tuple[float, int], ...]
    histogram_bin_width: float
    n_effectives: tuple[int, ...]
    flagged: int
    redraws: int
    frac_above_aic_margin: float
    frac_above_bic_margin: float


def _child_rng(seed: int, index: int) -> np.random.Generator:
    # counter-based generator keyed by (seed, index): splitting is stable
    # for any worker layout
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(seq))


def _replicate_job(entries, seed: int, index: int):
    spectrum = RankSpectrum(entries)
    rng = _child_rng(seed, index)
    replicate, redraws = replicate_with_redraws(spectrum, rng)
    try:
        report = replicate_statistic(replicate, index)
    except (FitError, ValueError):
        return index, None, redraws
    return index, report, redraws


_WORKER_STATE: dict = {}


def _init_worker(entries, seed: int) -> None:
    _WORKER_STATE["entries"] = entries
    _WORKER_STATE["seed"] = seed


def _worker_job(index: int):
    return _replicate_job(_WORKER_STATE["entries"], _WORKER_STATE["seed"], index)


def freedman_diaconis_histogram(
    values: tuple[float, ...] | list[float],
) -> tuple[tuple[tuple[float, int], ...], float]:
    """Fixed-width bins with the Freedman-Diaconis width; returns (bins, width).

    Bins are (left_edge, count) and their counts sum to len(values).
    """
    m = len(values)
    if m == 0:
        return (), 0.0
    arr = np.sort(np.asarray(values, dtype=float))
    vmin, vmax = float(arr[0]), float(arr[-1])
    if vmin == vmax:
        return ((vmin, m),), 1.0
    q25, q75 = np.percentile(arr, [25.0, 75.0])
    width = 2.0 * float(q75 - q25) / m ** (1.0 / 3.0)
    if width <= 0:
        width = (vmax - vmin) / math.ceil(math.sqrt(m))
    nbins = max(1, math.ceil((vmax - vmin) / width))
    idx = np.minimum((arr - vmin) // width, nbins - 1).astype(int)
    tallies = np.bincount(idx, minlength=nbins)
    bins = tuple(
        (vmin + j * width, int(tallies[j])) for j in range(nbins)
    )
    return bins, width


def empirical_pvalue(
    s: RankSpectrum, replicates: int, seed: int = 0, workers: int = 1
) -> PValueReport:
    """Estimate how often the Beta function beats the piecewise-log function
    on Poisson replicates of the spectrum.

    Returns identical output for any workers value; workers only controls
    how many processes evaluate replicates.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if seed < 0:
        raise ValueError("seed must be non-negative")

    if workers == 1:
        results = [_replicate_job(s.entries, seed, i) for i in range(replicates)]
    else:
        chunk = max(1, replicates // (workers * 4))
        with multiprocessing.Pool(
            processes=workers, initializer=_init_worker, initargs=(s.entries, seed)
        ) as pool:
            results = pool.map(_worker_job, range(replicates), chunksize=chunk)

    results.sort(key=lambda item: item[0])
    statistics = []
    n_effectives = []
    flagged = 0
    redraws = 0
    positives = 0
    above_aic = 0
    above_bic = 0
    for _, report, reps_redraws in results:
        redraws += reps_redraws
        if report is None:
            flagged += 1
            continue
        statistics.append(report.statistic)
        n_effectives.append(report.n_effective)
        if report.statistic > 0:
            positives += 1
        if report.statistic > -2.0:
            above_aic += 1
        if report.statistic > -math.log(report.n_effective):
            above_bic += 1

    bins, width = freedman_diaconis_histogram(statistics)
    return PValueReport(
        replicates=replicates,
        p_value=positives / replicates,
        statistics=tuple(statistics),
        seed=seed,
        histogram=bins,
        histogram_bin_width=width,
        n_effectives=tuple(n_effectives),
        flagged=flagged,
        redraws=redraws,
        frac_above_aic_margin=above_aic / replicates,
        frac_above_bic_margin=above_bic / replicates,
    )
