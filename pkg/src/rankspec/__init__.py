"""Characterization of ranked count spectra: descriptive statistics,
competitive rank-function fitting, information-criterion model selection,
and Poisson-resampling significance testing."""

from .errors import (
    DataError,
    FitError,
    FixtureError,
    ParseError,
    PerfectFitError,
    PinyinError,
    RankSpecError,
)
from .fit import (
    BetaParams,
    FitOrder,
    LogParams,
    ModelFamily,
    ModelFit,
    PiecewiseLogParams,
    beta_init,
    eval_model,
    fit_beta,
    fit_log,
    fit_piecewise_log,
    log_intercept_from_constraint,
    log_rank_sum,
    scan_breakpoint,
    sse,
)
from .ingest import (
    FixtureSpec,
    PinyinSyllable,
    generate_fixture,
    generate_from_model,
    parse_counts_file,
    parse_pairs_file,
    validate_pinyin,
    write_counts_file,
)
from .resample import (
    PValueReport,
    ReplicateReport,
    empirical_pvalue,
    make_replicate,
    poisson_sample,
    replicate_statistic,
)
from .select import SelectionReport, aic, bic, delta_aic, rank_models
from .spectrum import (
    LorenzCurve,
    NormalizedSpectrum,
    RankSpectrum,
    SpectrumStats,
    build_spectrum,
    descriptive_stats,
    gini,
    histogram,
    lorenz_curve,
    normalize,
    top_share,
)

__version__ = "0.1.0"
