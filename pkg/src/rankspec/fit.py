"""Rank-function families and their least-squares fits.

Three families are supported: a normalization-constrained logarithmic line,
a two-piece logarithmic function (optionally forced continuous at a converge
point), and a two-exponent Beta rank function.  Logarithms are natural
throughout.  All fits are deterministic and pure.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import FitError
from .spectrum import NormalizedSpectrum


class ModelFamily(enum.Enum):
    LOG = "LOG"
    PIECEWISE_LOG = "PIECEWISE_LOG"
    BETA = "BETA"


class FitOrder(enum.Enum):
    HIGH_FIRST = "HIGH_FIRST"
    LOW_FIRST = "LOW_FIRST"


@dataclass(frozen=True)
class LogParams:
    """f(r) = C + a*ln(r); fit_log keeps C tied to the sum-to-one constraint."""

    C: float
    a: float


@dataclass(frozen=True)
class PiecewiseLogParams:
    """Two logarithmic segments split after rank r0.

    (C, a) covers ranks [1, r0], (C_prime, a_prime) covers (r0, n].  When
    continuous, both lines agree at converge_point (default r0).
    """

    C: float
    a: float
    C_prime: float
    a_prime: float
    r0: int
    continuous: bool = False
    fit_order: FitOrder = FitOrder.HIGH_FIRST
    converge_point: float | None = None

    def __post_init__(self):
        if self.r0 < 2:
            raise ValueError("breakpoint r0 must be >= 2")
        if self.converge_point is None:
            object.__setattr__(self, "converge_point", float(self.r0))
        if self.converge_point <= 0:
            raise ValueError("converge_point must be positive")
        if self.continuous:
            xc = math.log(self.converge_point)
            gap = (self.C + self.a * xc) - (self.C_prime + self.a_prime * xc)
            if abs(gap) > 1e-10:
                raise ValueError(
                    f"segments disagree at the converge point by {gap:.3e}"
                )


@dataclass(frozen=True)
class BetaParams:
    """f(r) = C * (n+1-r)^b / r^a with C > 0."""

    C: float
    a: float
    b: float

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError("Beta scale C must be positive")


Params = LogParams | PiecewiseLogParams | BetaParams

_PARAM_TYPES = {
    ModelFamily.LOG: LogParams,
    ModelFamily.PIECEWISE_LOG: PiecewiseLogParams,
    ModelFamily.BETA: BetaParams,
}


@dataclass(frozen=True)
class ModelFit:
    """A fitted model: family, parameters, achieved SSE, and the K charged
    to it by information criteria (LOG 2, BETA 3, piecewise 4, or 3 when
    continuous)."""

    family: ModelFamily
    params: Params
    sse: float
    k: int
    n: int

    def __post_init__(self):
        if not isinstance(self.params, _PARAM_TYPES[self.family]):
            raise ValueError(f"params do not match family {self.family.value}")
        if self.sse < 0:
            raise ValueError("sse must be non-negative")
        if self.k < 1 or self.n < 1:
            raise ValueError("k and n must be positive")


def log_rank_sum(n: int) -> float:
    """Sum of ln(r) for r = 1..n, summed term by term."""
    return float(np.log(np.arange(1, n + 1, dtype=float)).sum())


def log_intercept_from_constraint(a: float, n: int) -> float:
    """Intercept C that makes sum_r (C + a*ln r) equal 1."""
    return (1.0 - a * log_rank_sum(n)) / n


def model_values(family: ModelFamily, params: Params, n: int) -> np.ndarray:
    """Evaluate a model at every rank 1..n."""
    r = np.arange(1, n + 1, dtype=float)
    if family is ModelFamily.LOG:
        return params.C + params.a * np.log(r)
    if family is ModelFamily.PIECEWISE_LOG:
        logr = np.log(r)
        return np.where(
            r <= params.r0,
            params.C + params.a * logr,
            params.C_prime + params.a_prime * logr,
        )
    return params.C * (n + 1 - r) ** params.b / r ** params.a


def eval_model(fit: ModelFit, r: int) -> float:
    """Model value at one rank; r must lie in [1, n]."""
    if not 1 <= r <= fit.n:
        raise ValueError(f"rank {r} outside [1, {fit.n}]")
    p = fit.params
    if fit.family is ModelFamily.LOG:
        return p.C + p.a * math.log(r)
    if fit.family is ModelFamily.PIECEWISE_LOG:
        if r <= p.r0:
            return p.C + p.a * math.log(r)
        return p.C_prime + p.a_prime * math.log(r)
    return p.C * (fit.n + 1 - r) ** p.b / r ** p.a


def sse(fit: ModelFit, y: NormalizedSpectrum) -> float:
    """Sum of squared errors of a fit against normalized data (not divided by n)."""
    if fit.n != y.source_n:
        raise ValueError(f"fit is for n={fit.n} but data has n={y.source_n}")
    resid = model_values(fit.family, fit.params, fit.n) - y.as_array()
    return float(resid @ resid)


def fit_log(y: NormalizedSpectrum) -> ModelFit:
    """Closed-form constrained fit of C + a*ln(r).

    Substituting the sum-to-one constraint leaves one free parameter, so the
    slope has an exact least-squares solution and no iteration is needed.
    """
    n = y.source_n
    if n < 2:
        raise ValueError("need at least 2 points to fit a line")
    yv = y.as_array()
    x = np.log(np.arange(1, n + 1, dtype=float))
    u = x - x.sum() / n
    a = float(u @ (yv - 1.0 / n)) / float(u @ u)
    c = (1.0 - a * float(x.sum())) / n
    pred = c + a * x
    resid = pred - yv
    return ModelFit(ModelFamily.LOG, LogParams(C=c, a=a), float(resid @ resid), 2, n)


def _ols_line(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Unconstrained intercept/slope least squares."""
    xm = float(x.mean())
    ym = float(y.mean())
    dx = x - xm
    slope = float(dx @ (y - ym)) / float(dx @ dx)
    return ym - slope * xm, slope


def _pinned_line(x: np.ndarray, y: np.ndarray, xc: float, v: float) -> tuple[float, float]:
    """Least-squares slope of a line forced through (xc, v)."""
    dx = x - xc
    slope = float(dx @ (y - v)) / float(dx @ dx)
    return v - slope * xc, slope


def _piecewise_core(
    yv: np.ndarray,
    logx: np.ndarray,
    r0: int,
    continuous: bool,
    fit_order: FitOrder,
    converge_point: float,
) -> tuple[PiecewiseLogParams, float, int]:
    x1, y1 = logx[:r0], yv[:r0]
    x2, y2 = logx[r0:], yv[r0:]
    if continuous:
        xc = math.log(converge_point)
        if fit_order is FitOrder.HIGH_FIRST:
            c1, a1 = _ols_line(x1, y1)
            c2, a2 = _pinned_line(x2, y2, xc, c1 + a1 * xc)
        else:
            c2, a2 = _ols_line(x2, y2)
            c1, a1 = _pinned_line(x1, y1, xc, c2 + a2 * xc)
        k = 3
    else:
        c1, a1 = _ols_line(x1, y1)
        c2, a2 = _ols_line(x2, y2)
        k = 4
    r1 = (c1 + a1 * x1) - y1
    r2 = (c2 + a2 * x2) - y2
    total = float(r1 @ r1) + float(r2 @ r2)
    params = PiecewiseLogParams(
        C=c1,
        a=a1,
        C_prime=c2,
        a_prime=a2,
        r0=r0,
        continuous=continuous,
        fit_order=fit_order,
        converge_point=converge_point,
    )
    return params, total, k


def fit_piecewise_log(
    y: NormalizedSpectrum,
    r0: int,
    continuous: bool = False,
    fit_order: FitOrder = FitOrder.HIGH_FIRST,
    converge_point: float | None = None,
) -> ModelFit:
    """Fit two logarithmic segments split after rank r0.

    Without continuity each segment gets its own ordinary least squares line
    (K=4).  With continuity the segment named by fit_order is fitted first
    and the other segment's intercept is pinned so both lines meet at the
    converge point (K=3).
    """
    n = y.source_n
    if not 2 <= r0 < n:
        raise ValueError(f"breakpoint r0={r0} outside [2, {n - 1}]")
    if n - r0 < 2:
        raise ValueError(f"segment ({r0}, {n}] has fewer than 2 points")
    cp = float(r0) if converge_point is None else float(converge_point)
    if cp <= 0:
        raise ValueError("converge_point must be positive")
    yv = y.as_array()
    logx = np.log(np.arange(1, n + 1, dtype=float))
    params, total, k = _piecewise_core(yv, logx, r0, continuous, fit_order, cp)
    return ModelFit(ModelFamily.PIECEWISE_LOG, params, total, k, n)


def scan_breakpoint(
    y: NormalizedSpectrum,
    r0_min: int = 2,
    r0_max: int | None = None,
    continuous: bool = False,
    fit_order: FitOrder = FitOrder.HIGH_FIRST,
) -> ModelFit:
    """Fit every breakpoint in [r0_min, r0_max] and keep the smallest SSE.

    The default range is [2, floor(n/5)].  Exact SSE ties go to the smaller
    breakpoint.
    """
    n = y.source_n
    if r0_max is None:
        r0_max = n // 5
    if r0_min < 2 or r0_min > r0_max:
        raise ValueError(f"empty breakpoint range [{r0_min}, {r0_max}]")
    if r0_max > n - 2:
        raise ValueError(f"breakpoint range exceeds n-2 = {n - 2}")
    yv = y.as_array()
    logx = np.log(np.arange(1, n + 1, dtype=float))
    best = None
    for r0 in range(r0_min, r0_max + 1):
        cp = float(r0)
        params, total, k = _piecewise_core(yv, logx, r0, continuous, fit_order, cp)
        if best is None or total < best[1]:
            best = (params, total, k)
    params, total, k = best
    return ModelFit(ModelFamily.PIECEWISE_LOG, params, total, k, n)


def beta_init(y: NormalizedSpectrum) -> BetaParams:
    """Starting point for the Beta fit from a log-linear regression.

    Regresses ln(y) on -ln(r) and ln(n+1-r); the intercept gives ln(C).
    """
    n = y.source_n
    if n < 3:
        raise ValueError("need at least 3 points for the linearized start")
    yv = y.as_array()
    if (yv <= 0).any():
        raise ValueError("linearized start requires strictly positive values")
    r = np.arange(1, n + 1, dtype=float)
    design = np.column_stack([np.ones(n), -np.log(r), np.log(n + 1 - r)])
    coef, *_ = np.linalg.lstsq(design, np.log(yv), rcond=None)
    return BetaParams(C=float(np.exp(coef[0])), a=float(coef[1]), b=float(coef[2]))


def fit_beta(y: NormalizedSpectrum, init: BetaParams | None = None) -> ModelFit:
    """Levenberg-Marquardt fit of the Beta rank function.

    Minimizes the SSE over (C, a, b) with the analytic Jacobian
    (df/dC = f/C, df/da = -f*ln r, df/db = f*ln(n+1-r)).  The damping
    factor starts at 1e-3, grows tenfold on a rejected step and shrinks
    tenfold on an accepted one.  Iteration stops when the relative SSE
    decrease of an accepted step falls below 1e-10 or after 200 steps.
    Steps that drive C non-positive or the objective non-finite are
    rejected; the achieved SSE never exceeds the starting SSE.
    """
    n = y.source_n
    if n < 4:
        raise ValueError("need at least 4 points to fit the Beta function")
    if init is None:
        init = beta_init(y)
    yv = y.as_array()
    r = np.arange(1, n + 1, dtype=float)
    m = n + 1 - r
    logr = np.log(r)
    logm = np.log(m)

    def evaluate(c, a, b):
        f = c * m ** b / r ** a
        resid = f - yv
        return f, float(resid @ resid)

    c, a, b = init.C, init.a, init.b
    f, s = evaluate(c, a, b)
    if not math.isfinite(s):
        raise FitError("Beta objective is not finite at the starting point")

    lam = 1e-3
    for _ in range(200):
        jac = np.column_stack([f / c, -f * logr, f * logm])
        grad = jac.T @ (f - yv)
        hess = jac.T @ jac
        diag = np.diag(np.diag(hess))
        accepted = False
        rel = 0.0
        while lam <= 1e15:
            try:
                step = np.linalg.solve(hess + lam * diag, -grad)
            except np.linalg.LinAlgError:
                step = None
            if step is not None and np.isfinite(step).all():
                cn, an, bn = c + step[0], a + step[1], b + step[2]
                if cn > 0:
                    fn, sn = evaluate(cn, an, bn)
                    if math.isfinite(sn) and sn <= s:
                        rel = (s - sn) / s if s > 0 else 0.0
                        c, a, b, f, s = cn, an, bn, fn, sn
                        lam = max(lam / 10.0, 1e-15)
                        accepted = True
                        break
            lam *= 10.0
        if not accepted:
            # damping exhausted without improvement: already at a minimum
            break
        if rel < 1e-10:
            break
    return ModelFit(
        ModelFamily.BETA, BetaParams(C=float(c), a=float(a), b=float(b)), s, 3, n
    )
