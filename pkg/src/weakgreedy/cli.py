"""Command line experiment runner.

Exit codes: 0 success, 1 a bound check or audit failed, 2 configuration
or missing-file error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import warnings
from pathlib import Path

from . import io
from .approx import SolverError
from .config import ConfigError, bundled_configs, load_config
from .experiments import (compute_widths, lemma_fuzz, lowerbound_experiment, run_pipeline,
                          write_lemma_fuzz, write_lowerbound, write_run)
from .greedy import GreedyError, run_weak_greedy
from .sets import realize
from .simplex import LPError

log = logging.getLogger("weakgreedy")

EXIT_OK, EXIT_BOUND, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
ENV_OUT = "WEAKGREEDY_OUT"


def _out_dir(args, cfg=None) -> Path:
    if args.out:
        return Path(args.out)
    if cfg is not None and cfg.out:
        return Path(cfg.out)
    return Path(os.environ.get(ENV_OUT, "out"))


def cmd_run(args) -> int:
    cfg = load_config(args.config, args.override, args.seed)
    res = run_pipeline(cfg, jobs=args.jobs)
    out = _out_dir(args, cfg)
    write_run(res, out)
    c = res.counts()
    print(f"{cfg.name}: {res.trace.steps} steps, sigma_last={res.trace.sigmas[-1]!r}; "
          f"bounds pass={c['pass']} fail={c['fail']} hypothesis-unmet={c['hypothesis-unmet']}; "
          f"audit problems={len(res.audit)} -> {out}")
    for r in res.reports:
        if r.status == "fail" and not r.exploratory:
            print(f"FAIL {r.name} N={r.N} K={r.K} m={r.m} slack_log={r.slack_log!r}")
    for p in res.audit:
        print(f"AUDIT {p}")
    return res.exit_code


def cmd_widths(args) -> int:
    cfg = load_config(args.config, args.override, args.seed)
    F = realize(cfg.set_spec(), cfg.norm_kind)
    trace = run_weak_greedy(F, cfg.greedy) if "greedy" in cfg.width_methods else None
    ws = compute_widths(cfg, F, trace) if trace is not None else None
    if ws is None:
        from .widths import assemble_widths
        ws = assemble_widths(F, cfg.greedy.n_max or len(F), cfg.width_methods, grid=cfg.grid)
    out = _out_dir(args, cfg)
    io.write_csv(out / "widths.csv", ["n", "value", "tag", "method"], io.widths_rows(ws))
    print(f"{cfg.name}: {len(ws.values)} width entries -> {out / 'widths.csv'}")
    return EXIT_OK


def cmd_lowerbound(args) -> int:
    if not args.alpha > 0.5:
        print("error: alpha must exceed 1/2", file=sys.stderr)
        return EXIT_CONFIG
    seed = 0 if args.seed is None else args.seed
    res = lowerbound_experiment(args.alpha, args.levels, args.trials, seed, jobs=args.jobs)
    out = _out_dir(args)
    write_lowerbound(res, out)
    print(f"{'n':>3} {'N':>4} {'sigma_N':>12} {'dbar_med':>12} {'ratio':>8} {'ratio/sqrtN':>12}")
    for r in res.table:
        print(f"{r['n']:>3} {r['N']:>4} {r['sigma_N']:>12.6g} {r['dbar_median']:>12.6g} "
              f"{r['ratio_median']:>8.4f} {r['ratio_median_over_sqrt_N']:>12.4f}")
    print(f"sigmas exact: {res.sigmas_exact}; ratio increasing: {res.increasing}")
    return res.exit_code


def cmd_lemma_fuzz(args) -> int:
    seed = 0 if args.seed is None else args.seed
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        reports, worst = lemma_fuzz(args.K_max, args.draws, seed)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    out = _out_dir(args)
    write_lemma_fuzz(reports, worst, out)
    failed = sum(r.status == "fail" for r in reports)
    print(f"lemma fuzz: {len(reports)} draws, {failed} failures; worst slack_log="
          f"{worst['slack_log'] if worst else 'n/a'}")
    return EXIT_BOUND if failed else EXIT_OK


def cmd_report(args) -> int:
    out = _out_dir(args)
    path = out / "bounds.csv"
    if not path.is_file():
        print(f"error: {path} not found", file=sys.stderr)
        return EXIT_CONFIG
    rows = io.read_csv(path)
    by = {}
    for r in rows:
        by.setdefault(r["name"], {}).setdefault(r["pass"], 0)
        by[r["name"]][r["pass"]] += 1
    for name in sorted(by):
        parts = ", ".join(f"{k}={v}" for k, v in sorted(by[name].items()))
        print(f"{name:>16}: {parts}")
    return EXIT_BOUND if any(r["pass"] == "fail" for r in rows) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="weakgreedy", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help=f"output directory (default ${ENV_OUT} or ./out)")
    common.add_argument("--seed", type=int, default=None, help="master seed")
    common.add_argument("--jobs", type=int, default=1, help="worker count for distance sweeps")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def with_config(p):
        p.add_argument("--config", required=True,
                       help="config path or bundled name: " + ", ".join(bundled_configs()))
        p.add_argument("--override", action="append", default=[], metavar="SECTION.KEY=VALUE")
        return p

    with_config(sub.add_parser("run", parents=[common], help="greedy + widths + bounds")).set_defaults(func=cmd_run)
    with_config(sub.add_parser("widths", parents=[common], help="width table only")).set_defaults(func=cmd_widths)
    p = sub.add_parser("lowerbound", parents=[common], help="dyadic-blocks ratio experiment in l_inf")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--levels", type=int, default=5)
    p.add_argument("--trials", type=int, default=16)
    p.set_defaults(func=cmd_lowerbound)
    p = sub.add_parser("lemma-fuzz", parents=[common], help="randomized matrix-inequality checks")
    p.add_argument("--K-max", dest="K_max", type=int, default=8)
    p.add_argument("--draws", type=int, default=1000)
    p.set_defaults(func=cmd_lemma_fuzz)
    sub.add_parser("report", parents=[common], help="summarize bounds.csv in --out").set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, GreedyError, LPError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
