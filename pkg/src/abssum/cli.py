"""Command-line experiment runner.

::

    abssum list-presets
    abssum run thm23-weighted --out results/
    abssum check config.toml --only hypotheses --N 5000

``run`` writes ``ledger.csv``, ``hypotheses.csv``, ``decomposition.csv``
and ``summary.txt`` into the output directory; the files depend only on
the config, so repeated runs produce identical bytes.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import config as cfgmod
from .config import ExperimentConfig, parse_method
from .decomposition import bounded_sums, bounded_sums_reports, decomposition_table
from .errors import AccuracyError, ConfigError, SummabilityError
from .fourier import (
    LIBRARY,
    PHI1_BV,
    PHI_BV,
    T_BOUNDED,
    FourierState,
    bv_diagnostic,
    phi,
    phi_alpha,
    sampled_from_csv,
    t_boundedness_report,
)
from .matrices import (
    COLUMN_MONOTONE,
    DIAGONAL_WEIGHT,
    HAT_COLUMN_SUM,
    ROW_SUM_ONE,
    TriangularMethod,
    cesaro_method,
    check_matrix_conditions,
    custom_method,
    identity_method,
    random_method,
    weighted_mean_method,
)
from .sequences import LazySequence, WeightSystem, make_weights, sequence_from_expression
from .summability import (
    CSV_VERSION,
    HypothesisLedger,
    SummabilityLedger,
    check_hypotheses,
    check_lemma,
    factored_series,
    index_cesaro,
    index_matrix,
    invert_cesaro_one_mean,
    LEMMA_POINTWISE,
    LEMMA_SUM,
)

log = logging.getLogger("abssum")


@dataclass
class Experiment:
    """Resolved objects for one config."""

    config: ExperimentConfig
    a: LazySequence
    lam: LazySequence
    X: LazySequence
    w: WeightSystem
    A: TriangularMethod
    state: FourierState | None = None


def build_method(spec: str, w: WeightSystem) -> TriangularMethod:
    name, arg = parse_method(spec)
    if name == "weighted_mean":
        return weighted_mean_method(w)
    if name == "identity":
        return identity_method()
    if name == "cesaro":
        return cesaro_method(float(arg))
    if name == "random":
        return random_method(int(arg))
    return custom_method(arg)


def build(cfg: ExperimentConfig) -> Experiment:
    cfg.validate()
    lam = sequence_from_expression(cfg.factor, 0)
    X = sequence_from_expression(cfg.majorant, 0)
    w = make_weights(sequence_from_expression(cfg.weights, 0))
    A = build_method(cfg.method, w)
    s = cfg.series
    state = None
    if s.kind == "a":
        a = sequence_from_expression(s.expr, 1)
    elif s.kind == "t":
        a = invert_cesaro_one_mean(sequence_from_expression(s.expr, 1))
    else:
        if s.function == "custom":
            f = sampled_from_csv(s.path)
        elif s.function in ("sin", "cos"):
            f = LIBRARY[s.function](s.m)
        else:
            f = LIBRARY[s.function]()
        state = FourierState(f, s.x, cfg.tol)
        a = state.C
    return Experiment(cfg, a, lam, X, w, A, state)


@dataclass
class RunResult:
    reports: HypothesisLedger = field(default_factory=lambda: HypothesisLedger({}))
    ledger: SummabilityLedger | None = None
    decomposition: object | None = None


def execute(exp: Experiment, checks: tuple[str, ...] | None = None) -> RunResult:
    cfg = exp.config
    checks = cfg.checks if checks is None else checks
    N = cfg.N
    res = RunResult()
    reports: dict = {}
    if "hypotheses" in checks:
        hyp = check_hypotheses(exp.a, exp.lam, exp.X, exp.w, cfg.k, cfg.variant, N, cfg.sigma, cfg.beta,
                               include_lemma="lemma" in checks)
        reports.update(hyp.reports)
    elif "lemma" in checks:
        r1, r2 = check_lemma(exp.lam, exp.X, N)
        reports[LEMMA_POINTWISE], reports[LEMMA_SUM] = r1, r2
    if "matrix-conditions" in checks:
        ids = (ROW_SUM_ONE, COLUMN_MONOTONE, DIAGONAL_WEIGHT, HAT_COLUMN_SUM)
        reports.update(zip(ids, check_matrix_conditions(exp.A, exp.w, N)))
    if "fourier" in checks:
        centered = exp.state.centered()
        x = exp.state.x
        reports[PHI_BV] = bv_diagnostic(phi(centered, x), levels=range(6, 13))
        reports[PHI1_BV] = bv_diagnostic(phi_alpha(centered, x, 1.0, tol=1e-11), levels=range(6, 13))
        reports[T_BOUNDED] = t_boundedness_report(exp.state, N)
    if "index" in checks:
        res.ledger = index_matrix(factored_series(exp.a, exp.lam), exp.A, exp.w, cfg.k, N)
        reports["index-sum"] = res.ledger.report()
        if parse_method(cfg.method)[0] == "cesaro":
            # the same factored series under |C,alpha|_k, for comparison
            cesaro = index_cesaro(factored_series(exp.a, exp.lam), cfg.alpha, cfg.k, N)
            reports["cesaro-index-sum"] = cesaro.report()
    if "decomposition" in checks:
        table = decomposition_table(exp.A, exp.a, exp.lam, N)
        pieces, total = bounded_sums(exp.A, exp.a, exp.lam, exp.w, cfg.k, N, table)
        reports.update(bounded_sums_reports(pieces, total))
        res.decomposition = table
    res.reports = HypothesisLedger(reports)
    return res


def write_outputs(exp: Experiment, res: RunResult, out: Path, checks: tuple[str, ...]) -> None:
    out.mkdir(parents=True, exist_ok=True)
    res.reports.to_csv(out / "hypotheses.csv")
    if res.ledger is not None:
        res.ledger.to_csv(out / "ledger.csv")
    if res.decomposition is not None:
        res.decomposition.to_csv(out / "decomposition.csv")
    (out / "summary.txt").write_text(summary_text(exp, res, checks))


def summary_text(exp: Experiment, res: RunResult, checks: tuple[str, ...]) -> str:
    cfg = exp.config
    lines = [
        f"{CSV_VERSION} summary",
        f"experiment: {cfg.name}",
    ]
    if cfg.scenario:
        lines.append(f"scenario: {cfg.scenario}")
    s = cfg.series
    src = f"fourier {s.function} at x = {s.x!r}" if s.kind == "fourier" else f"{s.kind}_n = {s.expr}"
    lines += [
        f"series: {src}",
        f"lambda_n = {cfg.factor}; X_n = {cfg.majorant}; p_n = {cfg.weights}; method = {cfg.method}",
        f"k = {cfg.k!r}; sigma = {cfg.sigma!r}; beta = {cfg.beta!r}; variant = {cfg.variant}; N = {cfg.N}",
        f"checks: {', '.join(checks)}",
        "",
    ]
    width = max((len(c) for c in res.reports.reports), default=0)
    for cid, r in res.reports.reports.items():
        lines.append(f"{cid:<{width}}  {r.verdict:<24}  sup={r.sup_ratio:.6g}  slope={r.tail_slope:.3g}")
    if res.ledger is not None:
        lines.append(f"index partial sum at N: {res.ledger.total:.12g}")
    if res.decomposition is not None:
        lines.append(f"decomposition max scaled residual: {res.decomposition.max_scaled_residual():.3g}")
    lines += ["", f"overall: {res.reports.verdict}", ""]
    return "\n".join(lines)


def run(cfg: ExperimentConfig, out: str | Path | None = None, checks: tuple[str, ...] | None = None) -> int:
    """Run ``cfg`` and write its reports; 0 when every report is consistent, 1 otherwise."""
    exp = build(cfg)
    checks = cfg.checks if checks is None else tuple(checks)
    res = execute(exp, checks)
    write_outputs(exp, res, Path(cfg.out if out is None else out), checks)
    return 0 if res.reports.passed else 1


# ---------------------------------------------------------------- argparse


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="abssum", description="Absolute summability factor experiments.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("list-presets", help="show the built-in scenarios")
    for name, help_ in (("run", "run every configured check"), ("check", "run selected checks")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", help="TOML file or preset name")
        p.add_argument("--out", help="output directory (default: the config's)")
        p.add_argument("--N", type=int, help="override the number of terms")
        p.add_argument("--tol", type=float, help="override the quadrature tolerance")
        if name == "check":
            p.add_argument("--only", nargs="+", choices=cfgmod.CHECKS, required=True)
    show = sub.add_parser("show", help="print a preset or config as TOML")
    show.add_argument("config")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "list-presets":
            rows = cfgmod.list_presets()
            width = max(len(n) for n, _ in rows)
            for name, scenario in rows:
                print(f"{name:<{width}}  {scenario}")
            return 0
        cfg = cfgmod.resolve(args.config)
        if args.command == "show":
            print(cfgmod.render(cfg), end="")
            return 0
        cfg = cfgmod.override(cfg, N=args.N, tol=args.tol)
        checks = tuple(args.only) if args.command == "check" else None
        if checks and "fourier" in checks and cfg.series.kind != "fourier":
            raise ConfigError("the fourier check needs a fourier series", "checks")
        out = Path(args.out) if args.out else Path(cfg.out)
        status = run(cfg, out, checks)
        print((out / "summary.txt").read_text(), end="")
        return status
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except AccuracyError as exc:
        print(f"accuracy error: {exc}", file=sys.stderr)
        return 3
    except (SummabilityError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
