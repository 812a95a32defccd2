"""Command-line front end.

Wires parsing -> spectrum -> fitting -> selection -> resampling and emits
machine-readable JSON on stdout (or a file via -o) with diagnostics on
stderr.  Exit codes: 0 success, 1 usage error, 2 input/parse error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import plotting
from .errors import DataError, FitError, PerfectFitError
from .fit import (
    BetaParams,
    FitOrder,
    LogParams,
    ModelFamily,
    ModelFit,
    PiecewiseLogParams,
    beta_init,
    fit_beta,
    fit_log,
    fit_piecewise_log,
    model_values,
    scan_breakpoint,
)
from .ingest import (
    FixtureSpec,
    generate_fixture,
    generate_from_model,
    parse_counts_file,
    parse_pairs_file,
    write_counts_file,
)
from .resample import empirical_pvalue
from .select import rank_models
from .spectrum import (
    RankSpectrum,
    build_spectrum,
    descriptive_stats,
    gini,
    histogram,
    normalize,
    top_share,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3

DEFAULT_TOP_SHARES = (0.01, 0.05, 0.10, 0.25)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we map usage to 1
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    """Resolved invocation: one subcommand plus its knobs."""

    subcommand: str
    input_path: str | None
    input_format: str
    model: str | None
    breakpoint: int | None  # None means AUTO scan over [2, floor(n/5)]
    continuous: bool
    fit_order: FitOrder
    converge_point: float | None
    replicates: int
    seed: int
    workers: int
    output: str | None
    plot_output: str | None
    view: str


def _env_seed(default: int) -> int:
    raw = os.environ.get("RANKSPEC_SEED")
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise DataError(f"RANKSPEC_SEED is not an integer: {raw!r}") from None


def _build_parser() -> _Parser:
    parser = _Parser(prog="rankspec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input(p):
        p.add_argument("input", help="input data file")
        p.add_argument(
            "--format",
            choices=("counts", "pairs"),
            default="counts",
            help="input layout: counts CSV or character/pinyin pairs TSV",
        )
        p.add_argument(
            "--strict-pinyin",
            action="store_true",
            help="require pairs-file syllables to be in the bundled inventory",
        )

    def add_output(p):
        p.add_argument("-o", "--output", help="write machine output here instead of stdout")

    def add_model_knobs(p):
        p.add_argument(
            "--breakpoint",
            default="auto",
            help="piecewise breakpoint rank, or 'auto' to scan [2, n/5]",
        )
        p.add_argument("--continuous", action="store_true", help="force segment continuity")
        p.add_argument(
            "--fit-order",
            choices=("high-first", "low-first"),
            default="high-first",
            help="which segment is fitted first when continuity is forced",
        )
        p.add_argument(
            "--converge-point",
            type=float,
            default=None,
            help="rank where continuous segments meet (default: the breakpoint)",
        )

    p_stats = sub.add_parser("stats", help="descriptive and inequality statistics as JSON")
    add_input(p_stats)
    add_output(p_stats)
    p_stats.add_argument(
        "--top-share",
        type=float,
        action="append",
        default=None,
        help="additional top-share fraction to report (repeatable)",
    )

    p_fit = sub.add_parser("fit", help="fit one model family and report it as JSON")
    add_input(p_fit)
    add_output(p_fit)
    p_fit.add_argument("--model", choices=("log", "plog", "beta"), required=True)
    add_model_knobs(p_fit)

    p_sel = sub.add_parser("select", help="fit all three families and rank them")
    add_input(p_sel)
    add_output(p_sel)
    add_model_knobs(p_sel)
    p_sel.add_argument("--criterion", choices=("aic", "bic"), default="aic")

    p_sim = sub.add_parser("simulate", help="Poisson-replicate significance test")
    add_input(p_sim)
    add_output(p_sim)
    p_sim.add_argument("--replicates", type=int, default=1000)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--workers", type=int, default=None)
    p_sim.add_argument("--plot", help="also write a histogram of the statistic (SVG + TSV)")

    p_plot = sub.add_parser("plot", help="emit an SVG figure plus a TSV sidecar")
    add_input(p_plot)
    p_plot.add_argument("--kind", choices=("histogram", "spectrum", "overlay"), required=True)
    p_plot.add_argument(
        "--view", choices=plotting.VIEWS, default=None,
        help="axis scaling for spectrum plots (default linlin; overlay default loglin)",
    )
    p_plot.add_argument("--bin-width", type=int, default=1, help="histogram bin width")
    p_plot.add_argument("--with-fits", action="store_true", help="superimpose fitted curves")
    add_model_knobs(p_plot)
    p_plot.add_argument("-o", "--output", required=True, help="SVG path; TSV lands beside it")

    p_gen = sub.add_parser("generate", help="write a synthetic counts file")
    add_output(p_gen)
    p_gen.add_argument("--paper-fixture", action="store_true", help="the bundled fixture")
    p_gen.add_argument("--model", choices=("log", "plog", "beta"))
    p_gen.add_argument("--n", type=int, default=1280)
    p_gen.add_argument("--total", type=int, default=9505)
    p_gen.add_argument("--noise", choices=("none", "poisson"), default="none")
    p_gen.add_argument("--seed", type=int, default=None)
    p_gen.add_argument("--c", type=float, help="model scale / first intercept")
    p_gen.add_argument("--a", type=float, help="first slope or rank-decay exponent")
    p_gen.add_argument("--b", type=float, help="Beta tail exponent")
    p_gen.add_argument("--c2", type=float, help="piecewise second intercept")
    p_gen.add_argument("--a2", type=float, help="piecewise second slope")
    p_gen.add_argument("--r0", type=int, help="piecewise breakpoint rank")

    return parser


def _load_spectrum(ns) -> RankSpectrum:
    content = Path(ns.input).read_bytes()
    if ns.format == "pairs":
        pairs = parse_pairs_file(content, strict=ns.strict_pinyin)
    else:
        pairs = parse_counts_file(content)
    return build_spectrum(pairs)


def _emit(ns, payload: dict) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if getattr(ns, "output", None):
        Path(ns.output).write_text(text, encoding="utf-8")
        print(f"wrote {ns.output}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _params_dict(fit: ModelFit) -> dict:
    p = fit.params
    if isinstance(p, LogParams):
        return {"C": p.C, "a": p.a}
    if isinstance(p, PiecewiseLogParams):
        return {
            "C": p.C,
            "a": p.a,
            "C_prime": p.C_prime,
            "a_prime": p.a_prime,
            "r0": p.r0,
            "continuous": p.continuous,
            "fit_order": p.fit_order.value,
            "converge_point": p.converge_point,
        }
    return {"C": p.C, "a": p.a, "b": p.b}


def _fit_dict(fit: ModelFit) -> dict:
    return {
        "family": fit.family.value,
        "params": _params_dict(fit),
        "sse": fit.sse,
        "k": fit.k,
        "n": fit.n,
    }


def _resolve_breakpoint(ns) -> int | None:
    raw = str(ns.breakpoint).lower()
    if raw == "auto":
        return None
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"--breakpoint must be an integer or 'auto', got {raw!r}") from None


def _fit_order(ns) -> FitOrder:
    return FitOrder.HIGH_FIRST if ns.fit_order == "high-first" else FitOrder.LOW_FIRST


def _fit_piecewise(ns, y) -> ModelFit:
    r0 = _resolve_breakpoint(ns)
    if r0 is None:
        return scan_breakpoint(
            y, continuous=ns.continuous, fit_order=_fit_order(ns)
        )
    return fit_piecewise_log(
        y,
        r0,
        continuous=ns.continuous,
        fit_order=_fit_order(ns),
        converge_point=ns.converge_point,
    )


def _cmd_stats(ns) -> int:
    s = _load_spectrum(ns)
    st = descriptive_stats(s)
    fractions = list(DEFAULT_TOP_SHARES)
    for extra in ns.top_share or []:
        if extra not in fractions:
            fractions.append(extra)
    payload = {
        "n_syllables": st.n_syllables,
        "total_characters": st.total_characters,
        "mean": st.mean,
        "median": st.median,
        "sd": st.sd,
        "mad": st.mad,
        "coverage_mean_sd": st.coverage_mean_sd,
        "coverage_median_mad": st.coverage_median_mad,
        "singleton_count": st.singleton_count,
        "gini": gini(s),
        "top_shares": {f"{frac:g}": top_share(s, frac) for frac in fractions},
    }
    _emit(ns, payload)
    return EXIT_OK


def _cmd_fit(ns) -> int:
    s = _load_spectrum(ns)
    y = normalize(s)
    if ns.model == "log":
        fit = fit_log(y)
    elif ns.model == "beta":
        fit = fit_beta(y, beta_init(y))
    else:
        fit = _fit_piecewise(ns, y)
    _emit(ns, _fit_dict(fit))
    return EXIT_OK


def _three_fits(ns, y) -> list[ModelFit]:
    return [fit_log(y), _fit_piecewise(ns, y), fit_beta(y, beta_init(y))]


def _cmd_select(ns) -> int:
    s = _load_spectrum(ns)
    y = normalize(s)
    fits = _three_fits(ns, y)
    report = rank_models(fits, criterion=ns.criterion.upper())
    by_family = {fit.family: fit for fit in fits}
    payload = {
        "criterion": report.criterion,
        "entries": [
            {
                "family": e.family.value,
                "k": e.k,
                "sse": e.sse,
                "aic": e.aic,
                "bic": e.bic,
                "perfect_fit": e.perfect_fit,
                "params": _params_dict(by_family[e.family]),
            }
            for e in report.entries
        ],
        "best_by_aic": report.best_by_aic.value,
        "best_by_bic": report.best_by_bic.value,
        "delta_aic": [list(row) for row in report.deltas],
    }
    _emit(ns, payload)
    return EXIT_OK


def _cmd_simulate(ns) -> int:
    s = _load_spectrum(ns)
    seed = ns.seed if ns.seed is not None else _env_seed(0)
    workers = ns.workers if ns.workers is not None else (os.cpu_count() or 1)
    report = empirical_pvalue(s, ns.replicates, seed=seed, workers=workers)
    payload = {
        "replicates": report.replicates,
        "seed": report.seed,
        "p_value": report.p_value,
        "flagged": report.flagged,
        "redraws": report.redraws,
        "frac_above_aic_margin": report.frac_above_aic_margin,
        "frac_above_bic_margin": report.frac_above_bic_margin,
        "mean_n_effective": (
            sum(report.n_effectives) / len(report.n_effectives)
            if report.n_effectives
            else None
        ),
        "histogram_bin_width": report.histogram_bin_width,
        "histogram": [[left, count] for left, count in report.histogram],
        "statistics": list(report.statistics),
    }
    _emit(ns, payload)
    if ns.plot:
        svg = plotting.bar_figure(
            [left for left, _ in report.histogram],
            [count for _, count in report.histogram],
            report.histogram_bin_width,
            title="Replicate comparison statistic",
            xlabel="n * ln(SSE_plog / SSE_beta)",
            ylabel="replicates",
        )
        tsv = plotting.tsv_table(
            ["bin_left", "count"],
            [[left, count] for left, count in report.histogram],
        )
        _write_artifacts(ns.plot, svg, tsv)
    return EXIT_OK


def _write_artifacts(svg_path: str, svg: str, tsv: str) -> None:
    path = Path(svg_path)
    path.write_text(svg, encoding="utf-8")
    sidecar = path.with_suffix(".tsv")
    sidecar.write_text(tsv, encoding="utf-8")
    print(f"wrote {path} and {sidecar}", file=sys.stderr)


def _cmd_plot(ns) -> int:
    s = _load_spectrum(ns)
    if ns.kind == "histogram":
        bins = histogram(s, ns.bin_width)
        st = descriptive_stats(s)
        svg = plotting.bar_figure(
            [left for left, _ in bins],
            [count for _, count in bins],
            float(ns.bin_width),
            title="Histogram of characters per syllable",
            xlabel="characters per syllable",
            ylabel="syllables",
            markers=[
                (st.mean - st.sd, "mean-sd"),
                (st.mean + st.sd, "mean+sd"),
                (st.median - st.mad, "median-mad"),
                (st.median + st.mad, "median+mad"),
            ],
        )
        tsv = plotting.tsv_table(
            ["bin_start", "count"], [[left, count] for left, count in bins]
        )
        _write_artifacts(ns.output, svg, tsv)
        return EXIT_OK

    view = ns.view or ("loglin" if ns.kind == "overlay" else "linlin")
    y = normalize(s)
    ranks = tuple(range(1, s.n + 1))
    values = y.values
    curves = [plotting.Curve("data", tuple(float(r) for r in ranks), values, "markers")]
    header = ["rank", "y"]
    columns: list[tuple[str, ...]] = []
    if ns.kind == "overlay" or ns.with_fits:
        names = {"LOG": "f_log", "PIECEWISE_LOG": "f_plog", "BETA": "f_beta"}
        for fit in _three_fits(ns, y):
            fitted = tuple(float(v) for v in model_values(fit.family, fit.params, s.n))
            name = names[fit.family.value]
            curves.append(plotting.Curve(name, tuple(float(r) for r in ranks), fitted))
            header.append(name)
            columns.append(fitted)
    svg = plotting.xy_figure(
        curves,
        view,
        title="Ranked spectrum",
        xlabel="rank",
        ylabel="normalized count",
    )
    rows = []
    for i, rank in enumerate(ranks):
        row = [rank, values[i]]
        row.extend(col[i] for col in columns)
        rows.append(row)
    tsv = plotting.tsv_table(header, rows)
    _write_artifacts(ns.output, svg, tsv)
    return EXIT_OK


def _cmd_generate(ns) -> int:
    seed = ns.seed if ns.seed is not None else _env_seed(FixtureSpec.seed)
    if ns.paper_fixture:
        pairs = generate_fixture(FixtureSpec(seed=seed))
    elif ns.model:
        pairs = _generate_model_pairs(ns, seed)
    else:
        raise UsageError("generate needs --paper-fixture or --model")
    data = write_counts_file(pairs)
    if ns.output:
        Path(ns.output).write_bytes(data)
        print(f"wrote {ns.output}", file=sys.stderr)
    else:
        sys.stdout.write(data.decode("utf-8"))
    return EXIT_OK


def _generate_model_pairs(ns, seed: int):
    def need(value, flag):
        if value is None:
            raise UsageError(f"--model {ns.model} requires {flag}")
        return value

    if ns.model == "log":
        family = ModelFamily.LOG
        params = LogParams(C=need(ns.c, "--c"), a=need(ns.a, "--a"))
    elif ns.model == "beta":
        family = ModelFamily.BETA
        params = BetaParams(
            C=need(ns.c, "--c"), a=need(ns.a, "--a"), b=need(ns.b, "--b")
        )
    else:
        family = ModelFamily.PIECEWISE_LOG
        params = PiecewiseLogParams(
            C=need(ns.c, "--c"),
            a=need(ns.a, "--a"),
            C_prime=need(ns.c2, "--c2"),
            a_prime=need(ns.a2, "--a2"),
            r0=need(ns.r0, "--r0"),
        )
    return generate_from_model(family, params, ns.n, ns.total, ns.noise, seed)


_COMMANDS = {
    "stats": _cmd_stats,
    "fit": _cmd_fit,
    "select": _cmd_select,
    "simulate": _cmd_simulate,
    "plot": _cmd_plot,
    "generate": _cmd_generate,
}


def run(argv: list[str]) -> int:
    """Parse argv and execute one subcommand, mapping failures to exit codes."""
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return _COMMANDS[ns.command](ns)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (FitError, PerfectFitError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main() -> None:
    raise SystemExit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
