"""Information-criterion scoring and ranking of fitted models.

AIC is n*ln(SSE/n) + 2K and BIC is n*ln(SSE/n) + K*ln(n), both with natural
logarithms.  A zero SSE makes either criterion minus infinity; that case is
surfaced as PerfectFitError (or a perfect_fit flag in reports) instead of an
infinite float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import PerfectFitError
from .fit import ModelFamily, ModelFit

_FAMILY_ORDER = {family: index for index, family in enumerate(ModelFamily)}

CRITERIA = ("AIC", "BIC")


def aic(sse: float, n: int, k: int) -> float:
    """Akaike information criterion for a least-squares fit."""
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    if sse < 0:
        raise ValueError("sse must be non-negative")
    if sse == 0:
        raise PerfectFitError("SSE is zero: AIC is minus infinity (perfect fit)")
    return n * math.log(sse / n) + 2 * k


def bic(sse: float, n: int, k: int) -> float:
    """Bayesian information criterion; penalizes each parameter by ln(n)."""
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    if sse < 0:
        raise ValueError("sse must be non-negative")
    if sse == 0:
        raise PerfectFitError("SSE is zero: BIC is minus infinity (perfect fit)")
    return n * math.log(sse / n) + k * math.log(n)


def delta_aic(fit2: ModelFit, fit1: ModelFit) -> float:
    """AIC(fit2) - AIC(fit1) via n*ln(SSE2/SSE1) + 2*(K2 - K1)."""
    if fit2.n != fit1.n:
        raise ValueError(f"fits disagree on n: {fit2.n} vs {fit1.n}")
    if fit2.sse == 0 or fit1.sse == 0:
        raise PerfectFitError("SSE is zero: AIC difference is not finite")
    return fit2.n * math.log(fit2.sse / fit1.sse) + 2 * (fit2.k - fit1.k)


@dataclass(frozen=True)
class SelectionEntry:
    """One model's scores; aic/bic are None when the fit is perfect."""

    family: ModelFamily
    k: int
    sse: float
    aic: float | None
    bic: float | None
    perfect_fit: bool = False


@dataclass(frozen=True)
class SelectionReport:
    """Models sorted ascending by the requested criterion.

    deltas[i][j] is criterion(entry i) - criterion(entry j) under AIC, or
    None when either fit is perfect; the matrix is antisymmetric.
    """

    criterion: str
    entries: tuple[SelectionEntry, ...]
    best_by_aic: ModelFamily
    best_by_bic: ModelFamily
    deltas: tuple[tuple[float | None, ...], ...]


def _score(fit: ModelFit) -> SelectionEntry:
    if fit.sse == 0:
        return SelectionEntry(fit.family, fit.k, fit.sse, None, None, True)
    return SelectionEntry(
        fit.family,
        fit.k,
        fit.sse,
        aic(fit.sse, fit.n, fit.k),
        bic(fit.sse, fit.n, fit.k),
    )


def _sort_key(entry: SelectionEntry, criterion: str):
    value = entry.aic if criterion == "AIC" else entry.bic
    # perfect fits are minus infinity, so they sort ahead of everything
    return (
        0 if entry.perfect_fit else 1,
        value if value is not None else 0.0,
        _FAMILY_ORDER[entry.family],
        entry.k,
        entry.sse,
    )


def rank_models(fits: list[ModelFit], criterion: str = "AIC") -> SelectionReport:
    """Score fits on the same data and sort them by AIC or BIC.

    Ties break by family declaration order, so the output is invariant
    under permutation of the input.
    """
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}")
    if len(fits) < 2:
        raise ValueError("need at least 2 fits to rank")
    n = fits[0].n
    if any(fit.n != n for fit in fits):
        raise ValueError("all fits must share the same n")
    entries = sorted((_score(fit) for fit in fits), key=lambda e: _sort_key(e, criterion))
    deltas = tuple(
        tuple(
            None
            if (row.perfect_fit or col.perfect_fit) and row is not col
            else (0.0 if row is col else row.aic - col.aic)
            for col in entries
        )
        for row in entries
    )
    best_aic = min(entries, key=lambda e: _sort_key(e, "AIC")).family
    best_bic = min(entries, key=lambda e: _sort_key(e, "BIC")).family
    return SelectionReport(
        criterion=criterion,
        entries=tuple(entries),
        best_by_aic=best_aic,
        best_by_bic=best_bic,
        deltas=deltas,
    )
