"""Experiment pipelines shared by the CLI, the notebooks and the acceptance tests."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io
from .bounds import (TOL_REPORT, corollary_checks, lemma1_check, random_lemma_instance,
                     theorem_sweep)
from .greedy import WeakGreedyParams, audit_trace, run_weak_greedy
from .seqspace import NormKind
from .sets import DyadicBlocks, dyadic_values, named_rng, realize
from .widths import assemble_widths, width_upper_random_subspace

__all__ = ["RunResult", "run_pipeline", "write_run", "compute_widths", "LowerBoundResult",
           "lowerbound_experiment", "lowerbound_ratio_table", "write_lowerbound",
           "lemma_fuzz", "write_lemma_fuzz", "bound_exit_code"]


@dataclass
class RunResult:
    config: object
    F: object
    trace: object
    widths: object
    reports: list
    audit: list
    sigmas: np.ndarray

    def counts(self) -> dict:
        c = {"pass": 0, "fail": 0, "hypothesis-unmet": 0, "exploratory-fail": 0}
        for r in self.reports:
            if r.exploratory and r.status == "fail":
                c["exploratory-fail"] += 1
            else:
                c[r.status] += 1
        return c

    @property
    def exit_code(self) -> int:
        return bound_exit_code(self.reports, self.audit)

    def summary(self) -> dict:
        cfg = self.config
        return {
            "config": cfg.name,
            "set": {"kind": cfg.set_kind, "options": cfg.set_options, "count": len(self.F), "dim": self.F.dim},
            "seed": cfg.seed,
            "trace": self.trace.summary(),
            "widths_methods": cfg.width_methods,
            "bounds": self.counts(),
            "tol_report": TOL_REPORT,
            "audit": self.audit,
            "exit_code": self.exit_code,
        }


def bound_exit_code(reports, audit=()) -> int:
    failed = any(r.status == "fail" and not r.exploratory for r in reports)
    return 1 if failed or audit else 0


def _sigma_sequence(trace, n_max):
    if trace.terminated and n_max is not None:
        return trace.padded_sigmas(n_max + 1)
    return np.asarray(trace.sigmas, dtype=float)


def compute_widths(cfg, F, trace):
    n_max = len(_sigma_sequence(trace, cfg.greedy.n_max)) - 1
    return assemble_widths(F, n_max, cfg.width_methods, trace=trace, grid=cfg.grid, tol=cfg.greedy.tol)


def run_pipeline(cfg, jobs: int = 1) -> RunResult:
    """realize -> weak greedy -> audit -> widths -> bound checks."""
    F = realize(cfg.set_spec(), cfg.norm_kind)
    params = cfg.greedy
    if jobs != params.jobs:
        params = WeakGreedyParams(**{**params.__dict__, "jobs": jobs})
    trace = run_weak_greedy(F, params)
    audit = audit_trace(trace)
    sigmas = _sigma_sequence(trace, params.n_max)
    ws = compute_widths(cfg, F, trace)
    reports = []
    if cfg.theorem:
        mode = "hilbert" if trace.mode == "hilbert" else "banach"
        reports += theorem_sweep(sigmas, ws, params.gamma, mode, cfg.K_max, cfg.N_max,
                                 solver_tol=params.tol)
    if cfg.corollaries:
        reports += corollary_checks(sigmas, ws, cfg.rate, cfg.corollaries, gamma=params.gamma)
    return RunResult(cfg, F, trace, ws, reports, audit, sigmas)


def write_run(res: RunResult, out_dir):
    out = Path(out_dir)
    io.write_csv(out / "elements.csv", io.elements_header(res.F.dim), io.elements_rows(res.F.elements))
    io.write_csv(out / "sigmas.csv", ["n", "sigma_n"], io.sigmas_rows(res.trace.sigmas))
    io.write_csv(out / "A.csv", ["i", "j", "a_ij"], io.A_rows(res.trace.A))
    io.write_csv(out / "widths.csv", ["n", "value", "tag", "method"], io.widths_rows(res.widths))
    io.write_csv(out / "bounds.csv", io.BOUNDS_HEADER, io.bounds_rows(res.reports))
    io.write_json(out / "summary.json", res.summary())


# ---------------------------------------------------------------------------
# dyadic-blocks experiment in l_inf


@dataclass
class LowerBoundResult:
    alpha: float
    levels: int
    trials: int
    seed: int
    sigmas: np.ndarray
    sigmas_exact: bool
    table: list  # dict rows, one per n

    @property
    def ratios(self) -> np.ndarray:
        return np.array([r["ratio_median"] for r in self.table])

    @property
    def increasing(self) -> bool:
        return bool(np.all(np.diff(self.ratios) > 0))

    @property
    def exit_code(self) -> int:
        return 0 if self.sigmas_exact else 1


def lowerbound_set(alpha: float, levels: int):
    """Dyadic set in l_inf truncated after ``2^(2(levels-1))`` elements.

    That is where the block construction for ``n = levels - 1`` ends.
    """
    if not alpha > 0.5:
        raise ValueError("alpha must exceed 1/2")
    if levels < 2:
        raise ValueError("levels must be at least 2")
    spec = DyadicBlocks(alpha, 2 * (levels - 1))
    return realize(spec, NormKind.linf())


def lowerbound_ratio_table(F, sigmas, levels, trials, seed, jobs=1) -> list:
    alpha = F.spec.alpha
    rows = []
    for n in range(1, levels):
        N = 2 ** (n + 1)
        res = width_upper_random_subspace(F, n, trials=trials, seed=seed, jobs=jobs)
        # elements of the untruncated set that lie past the last block
        tail = 2.0 ** (-(2 * n + 1) * alpha)
        best = max(res.best, tail)
        med = max(res.median, tail)
        s = float(sigmas[N])
        rows.append({
            "n": n,
            "N": N,
            "span_dim": res.span_dim,
            "sigma_N": s,
            "dbar_min": best,
            "dbar_median": med,
            "ratio_min": s / best,
            "ratio_median": s / med,
            "sqrt_N": math.sqrt(N),
            "ratio_median_over_sqrt_N": s / med / math.sqrt(N),
            "trials": res.trials,
        })
    return rows


def lowerbound_experiment(alpha: float = 1.0, levels: int = 5, trials: int = 16, seed: int = 0,
                          jobs: int = 1, F=None, trace=None) -> LowerBoundResult:
    """Greedy errors against random-subspace width bounds at ``N = 2^(n+1)``.

    ``F`` and ``trace`` may be passed in to reuse the (seed independent)
    greedy run across seeds.
    """
    if F is None:
        F = lowerbound_set(alpha, levels)
    if trace is None:
        trace = run_weak_greedy(F, WeakGreedyParams(n_max=2 ** levels))
    x = dyadic_values(alpha, F.spec.levels)
    s = np.asarray(trace.sigmas, dtype=float)
    exact = bool(np.max(np.abs(s - x[:len(s)])) <= 1e-12)
    table = lowerbound_ratio_table(F, s, levels, trials, seed, jobs)
    return LowerBoundResult(alpha, levels, trials, seed, s, exact, table)


def write_lowerbound(res: LowerBoundResult, out_dir):
    out = Path(out_dir)
    io.write_csv(out / "sigmas.csv", ["n", "sigma_n"], io.sigmas_rows(res.sigmas))
    cols = ["n", "N", "span_dim", "sigma_N", "dbar_min", "dbar_median", "ratio_min",
            "ratio_median", "sqrt_N", "ratio_median_over_sqrt_N"]
    io.write_csv(out / "ratios.csv", cols, [{k: r[k] for k in cols} for r in res.table])
    trial_rows = [(r["n"], t, v) for r in res.table for t, v in enumerate(r["trials"])]
    io.write_csv(out / "trials.csv", ["n", "trial", "dist_max"], trial_rows)
    io.write_json(out / "summary.json", {
        "alpha": res.alpha, "levels": res.levels, "trials": res.trials, "seed": res.seed,
        "sigmas_exact": res.sigmas_exact, "ratio_median_increasing": res.increasing,
        "exit_code": res.exit_code,
    })


# ---------------------------------------------------------------------------
# randomized matrix-inequality sweep


def lemma_fuzz(K_max: int = 8, draws: int = 1000, seed: int = 0):
    """Random checks of the matrix inequality; returns ``(reports, worst)``."""
    if draws == 0:
        warnings.warn("lemma-fuzz with zero draws passes vacuously", stacklevel=2)
        return [], None
    rng = named_rng(seed, "bounds.lemma_fuzz")
    reports = [lemma1_check(random_lemma_instance(rng, K_max)) for _ in range(draws)]
    i = int(np.argmin([r.slack_log for r in reports]))
    r = reports[i]
    worst = {"draw": i, "K": r.K, "m": r.m, "lhs_log": r.lhs_log, "rhs_log": r.rhs_log,
             "slack_log": r.slack_log, "seed": seed, "draws": draws, "K_max": K_max}
    return reports, worst


def write_lemma_fuzz(reports, worst, out_dir):
    out = Path(out_dir)
    rows = [(i, r.K, r.m, r.lhs_log, r.rhs_log, r.slack_log, r.status) for i, r in enumerate(reports)]
    io.write_csv(out / "lemma_fuzz.csv", ["draw", "K", "m", "lhs_log", "rhs_log", "slack_log", "pass"], rows)
    io.write_json(out / "lemma_worst.json", worst if worst is not None else {"draws": 0, "vacuous": True})
