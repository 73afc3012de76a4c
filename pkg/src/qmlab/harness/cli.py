"""Command-line entry point: ``qmlab run <config>`` and ``qmlab check``.

Exit status is 0 when every check passes, 1 when any check fails or a
scenario raises, and 2 for configuration errors.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
import traceback
from concurrent.futures import ProcessPoolExecutor

from .config import ConfigError, ScenarioConfig, apply_tolerance_overrides, load_config
from .report import RunReport, ScenarioResult
from .scenarios import RUNNERS

OUT_DIR_ENV = "QMLAB_OUT_DIR"
EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


def acceptance_config() -> ScenarioConfig:
    """The built-in configuration used by ``check``: every scenario at default settings."""
    return ScenarioConfig(scenario="all").validate()


def run_kind(cfg: ScenarioConfig, kind: str) -> ScenarioResult:
    """Run one scenario; exceptions become a failed result that keeps the traceback tail."""
    try:
        return RUNNERS[kind](cfg)
    except Exception as exc:  # surfaced in the report, not swallowed
        tb = traceback.format_exc(limit=-3).strip().splitlines()
        return ScenarioResult(kind, error=f"{type(exc).__name__}: {exc} [{tb[-3] if len(tb) >= 3 else ''}]".strip())


def run(cfg: ScenarioConfig, jobs: int = 1) -> RunReport:
    """Execute the configured scenarios. Results are merged in config order whatever ``jobs`` is."""
    start = time.perf_counter()
    kinds = cfg.kinds()
    if jobs > 1 and len(kinds) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(kinds))) as pool:
            results = list(pool.map(run_kind, [cfg] * len(kinds), kinds))
    else:
        results = [run_kind(cfg, k) for k in kinds]
    return RunReport(cfg.to_dict(), results, wall_clock=time.perf_counter() - start)


def _resolve_out(args, cfg: ScenarioConfig) -> str:
    return args.out or os.environ.get(OUT_DIR_ENV) or cfg.out_dir


def _print_summary(report: RunReport, stream) -> None:
    for r in report.results:
        for c in r.checks:
            mark = "ok  " if c.passed else "FAIL"
            print(f"{mark} [{r.kind}] {c.name}: {c.computed:.6g} (tol {c.tolerance:.3g}, {c.tag})", file=stream)
        if r.error:
            print(f"FAIL [{r.kind}] error: {r.error}", file=stream)
    n_fail = sum(not c.passed for c in report.checks) + sum(bool(r.error) for r in report.results)
    print(f"{len(report.checks)} checks, {n_fail} failed, {report.wall_clock:.1f} s", file=stream)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help=f"output directory (overrides ${OUT_DIR_ENV} and the config)")
    common.add_argument("--seed", type=int, help="random seed (unsigned 64-bit)")
    common.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE", help="override a named tolerance")
    common.add_argument("--no-plots", action="store_true", help="skip SVG output")
    common.add_argument("--jobs", type=int, default=1, help="run scenarios in this many processes")
    common.add_argument("-q", "--quiet", action="store_true", help="print only the summary line")

    parser = argparse.ArgumentParser(prog="qmlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", parents=[common], help="run the scenarios described by a TOML config")
    p_run.add_argument("config", help="path to the TOML config")
    sub.add_parser("check", parents=[common], help="run the built-in acceptance configuration")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.command == "run" else acceptance_config()
        if args.seed is not None:
            cfg.seed = args.seed
        cfg = apply_tolerance_overrides(cfg, args.tol)
        if args.jobs < 1:
            raise ConfigError("--jobs: must be at least 1")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    report = run(cfg, jobs=args.jobs)
    out = _resolve_out(args, cfg)
    if cfg.plots and not args.no_plots:
        from .plots import emit_plots

        report.artifacts.extend(str(p) for p in emit_plots(report, out))
    report.write(out)
    if args.quiet:
        n_fail = sum(not c.passed for c in report.checks)
        print(f"{len(report.checks)} checks, {n_fail} failed")
    else:
        _print_summary(report, sys.stdout)
    print(f"artifacts in {out}")
    return EXIT_OK if report.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
