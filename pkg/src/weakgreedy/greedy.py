"""Weak greedy selection of approximation spaces and its coefficient matrix.

Two execution paths share one driver:

* ``hilbert`` -- Gram-Schmidt on the selected elements; the matrix entries
  are inner products with the orthonormalised sequence.
* ``banach`` -- distances from the norm-specific solver in
  :mod:`weakgreedy.approx`; the matrix entries are values of unit-norm
  functionals that vanish on the current space and attain the distance of
  the selected element.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .approx import DEFAULT_TOL, SolverError, Subspace, dist_lp, distance, gram_schmidt_extend
from .seqspace import TAU_DUAL, Functional, norm, norming_functional
from .sets import CompactSet

__all__ = [
    "POLICIES",
    "TAU_ANNIH",
    "WeakGreedyParams",
    "GreedyTrace",
    "GreedyError",
    "run_weak_greedy",
    "extract_A_hilbert",
    "extract_A_banach",
    "audit_trace",
    "select_index",
]

POLICIES = ("argmax", "first_above_threshold", "minimal_above_threshold")
TAU_ANNIH = 1e-8
SPAN_RTOL = 1e-12


class GreedyError(RuntimeError):
    """Solver failure inside the greedy loop, tagged with the step index."""

    def __init__(self, step, cause):
        super().__init__(f"step {step}: {cause}")
        self.step = step


@dataclass(frozen=True)
class WeakGreedyParams:
    gamma: float = 1.0
    n_max: int | None = None
    policy: str = "argmax"
    termination_eps: float = 1e-13
    mode: str = "auto"
    tol: float = DEFAULT_TOL
    select_rtol: float = 1e-12
    jobs: int = 1

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}")
        if self.mode not in ("auto", "hilbert", "banach"):
            raise ValueError("mode must be auto, hilbert or banach")
        if self.termination_eps < 0:
            raise ValueError("termination_eps must be non-negative")


@dataclass
class GreedyTrace:
    """Everything recorded during one weak greedy run.

    ``sigmas[n]`` is the set-wide maximum ``max_f dist(f, V_n)`` for
    ``n = 0..len(selected)``.  ``per_step_distances[n, i]`` is
    ``dist(f_i, V_n)``.  Row ``i`` / column ``j`` of ``A`` refer to the
    ``i``-th selected element and the ``j``-th step.
    """

    selected: list
    sigmas: list
    A: np.ndarray
    mode: str
    norm_kind: object
    params: WeakGreedyParams
    elements: np.ndarray
    per_step_distances: np.ndarray
    ortho: np.ndarray | None = None
    functionals: list = field(default_factory=list)
    functional_source: list = field(default_factory=list)
    functional_approximate: list = field(default_factory=list)
    annihilation: list = field(default_factory=list)
    terminated: bool = False

    @property
    def steps(self) -> int:
        return len(self.selected)

    def sigma(self, n: int) -> float:
        """``sigma_n``, padded with zeros after termination (``f_m := 0``)."""
        if n < len(self.sigmas):
            return float(self.sigmas[n])
        if self.terminated:
            return 0.0
        raise IndexError(f"sigma_{n} not computed (run stopped at n_max={self.steps})")

    def padded_sigmas(self, length: int) -> np.ndarray:
        return np.array([self.sigma(n) for n in range(length)])

    @property
    def approximate(self) -> bool:
        return any(self.functional_approximate)

    def summary(self) -> dict:
        p = self.params
        return {
            "mode": self.mode,
            "norm": self.norm_kind.label(),
            "selected": [int(i) for i in self.selected],
            "steps": self.steps,
            "terminated": bool(self.terminated),
            "params": {
                "gamma": p.gamma,
                "n_max": p.n_max,
                "policy": p.policy,
                "termination_eps": p.termination_eps,
            },
            "solver_tol": p.tol,
            "tau_annih": TAU_ANNIH,
            "functional_approximate": bool(self.approximate),
            "functional_source": list(self.functional_source),
        }


def select_index(dists, candidates, gamma, policy, rtol=1e-12):
    """Pick the next element among ``candidates`` (sorted indices).

    Ties are broken toward the smallest index; thresholds carry a relative
    slack ``rtol`` so that exact ties survive rounding.
    """
    d = dists[candidates]
    dmax = d.max()
    if policy == "argmax":
        return int(candidates[np.flatnonzero(d >= dmax * (1.0 - rtol))[0]])
    ok = np.flatnonzero(d >= gamma * dmax * (1.0 - rtol))
    if policy == "first_above_threshold":
        return int(candidates[ok[0]])
    dm = d[ok]
    low = ok[dm <= dm.min() * (1.0 + rtol)]
    return int(candidates[low[0]])


def _resolve_mode(F, params):
    if params.mode != "auto":
        if params.mode == "hilbert" and F.norm_kind.name != "hilbert":
            raise ValueError("the hilbert path needs a hilbert norm")
        return params.mode
    return "hilbert" if F.norm_kind.name == "hilbert" else "banach"


def _hilbert_distances(E, Q):
    R = E - (E @ Q.T) @ Q
    R = R - (R @ Q.T) @ Q
    return np.linalg.norm(R, axis=1)


def _banach_solver(kind, tol):
    if kind.name == "hilbert":
        # independent of the Gram-Schmidt route: Newton/least squares in l_2
        return lambda f, V: dist_lp(f, Subspace(V.basis), 2.0, tol)
    return lambda f, V: distance(f, V, kind, tol)


def run_weak_greedy(F: CompactSet, params: WeakGreedyParams | None = None) -> GreedyTrace:
    """Run the weak greedy algorithm on ``F``.

    Parameters
    ----------
    F : CompactSet
    params : WeakGreedyParams, optional

    Returns
    -------
    GreedyTrace
    """
    params = params or WeakGreedyParams()
    E = F.elements
    M = E.shape[0]
    if M == 0:
        raise ValueError("empty set")
    n_max = M if params.n_max is None else params.n_max
    if n_max > M:
        raise ValueError(f"n_max={n_max} exceeds the set size {M}")
    mode = _resolve_mode(F, params)
    kind = F.norm_kind
    solve = _banach_solver(kind, params.tol)
    pool = ThreadPoolExecutor(params.jobs) if params.jobs > 1 else None

    selected: list[int] = []
    sigmas: list[float] = []
    rows: list[np.ndarray] = []
    ortho = np.zeros((0, F.dim))  # Euclidean orthonormal basis of V_n
    step_vectors = []  # per step: f_j^* (hilbert) or None when dependent
    functionals, sources, approx_flags, annih = [], [], [], []
    terminated = False
    is_sel = np.zeros(M, dtype=bool)

    n = 0
    while True:
        # sweep: dist(f, V_n) for every element
        if n == 0:
            dists = F.norms()
            results = None
        elif mode == "hilbert":
            dists = _hilbert_distances(E, ortho)
            results = None
        else:
            V = Subspace(ortho, ortho)
            idx = np.flatnonzero(~is_sel)

            def one(i):
                try:
                    return solve(E[i], V)
                except SolverError as exc:
                    raise GreedyError(n, exc) from exc

            out = list(pool.map(one, idx)) if pool else [one(i) for i in idx]
            results = dict(zip(idx.tolist(), out))
            dists = np.zeros(M)
            for i, r in results.items():
                dists[i] = r.distance
            # membership in V_n does not depend on the norm; LP round-off
            # would otherwise leave ~1e-12 distances for elements of the span
            inside = _hilbert_distances(E, ortho) <= SPAN_RTOL * np.linalg.norm(E, axis=1)
            dists[inside] = 0.0
        dists[is_sel] = 0.0
        if rows:
            # V_n grows, so the previous best residual stays feasible; this
            # keeps per-element distances monotone under solver round-off
            dists = np.minimum(dists, rows[-1])
        rows.append(dists)
        sigma = float(dists.max())
        sigmas.append(sigma)
        cand = np.flatnonzero(~is_sel)
        if cand.size == 0 or (params.termination_eps > 0 and sigma <= params.termination_eps):
            terminated = True
            break
        if n >= n_max:
            break

        j = select_index(dists, cand, params.gamma, params.policy, params.select_rtol)
        f = E[j]
        q, _ = gram_schmidt_extend(ortho, f)
        if mode == "hilbert":
            step_vectors.append(q)
        else:
            lam, src, flag, worst = _step_functional(f, results[j] if results else None, E[selected], kind, dists[j])
            functionals.append(lam)
            sources.append(src)
            approx_flags.append(flag)
            annih.append(worst)
        if q is not None:
            ortho = np.vstack([ortho, q])
        selected.append(j)
        is_sel[j] = True
        n += 1

    if pool:
        pool.shutdown()
    trace = GreedyTrace(
        selected=selected,
        sigmas=sigmas,
        A=np.zeros((0, 0)),
        mode=mode,
        norm_kind=kind,
        params=params,
        elements=E,
        per_step_distances=np.array(rows),
        functionals=functionals,
        functional_source=sources,
        functional_approximate=approx_flags,
        annihilation=annih,
        terminated=terminated,
    )
    if mode == "hilbert":
        trace.ortho = np.array([np.zeros(F.dim) if q is None else q for q in step_vectors]).reshape(-1, F.dim)
        trace.A = extract_A_hilbert(trace)
    else:
        trace.A = extract_A_banach(trace)
    return trace


def _step_functional(f, res, prev, kind, dist):
    """Unit functional vanishing on span(prev) with value ``dist`` at ``f``.

    Returns ``(functional, source, approximate_flag, worst_annihilation)``.
    """
    dual_kind = kind.dual()
    if dist == 0.0 or res is None and prev.shape[0] > 0:
        return Functional(np.zeros_like(f), dual_kind), "zero", dist > 0, 0.0
    if res is None:  # first step, V_0 = {0}
        lam = norming_functional(f, kind)
        return lam, "norming", False, 0.0
    lam = norming_functional(res.residual, kind)
    worst = float(np.abs(prev @ lam.coeffs).max(initial=0.0))
    source = "norming"
    if worst > TAU_ANNIH and not kind.is_smooth and res.dual is not None:
        lam = Functional(res.dual, dual_kind)
        worst = float(np.abs(prev @ lam.coeffs).max(initial=0.0))
        source = "lp-dual"
    return lam, source, worst > TAU_ANNIH, worst


def extract_A_hilbert(trace: GreedyTrace) -> np.ndarray:
    """``a_ij = <f_sel[i], f_j^*>``; dependent steps contribute a zero column."""
    if trace.mode != "hilbert":
        raise ValueError("extract_A_hilbert needs a hilbert-mode trace")
    X = trace.elements[trace.selected]
    A = X @ trace.ortho.T if trace.steps else np.zeros((0, 0))
    upper = np.abs(np.triu(A, 1)).max(initial=0.0)
    if upper > 1e-10:
        raise ValueError(f"Gram-Schmidt coefficients not lower triangular ({upper:.2e})")
    return np.tril(A)


def extract_A_banach(trace: GreedyTrace) -> np.ndarray:
    """``a_ij = lambda_j(f_sel[i])``; entries above the diagonal are kept as computed."""
    if trace.mode != "banach":
        raise ValueError("extract_A_banach needs a banach-mode trace")
    X = trace.elements[trace.selected]
    if not trace.functionals:
        return np.zeros((0, 0))
    L = np.array([lam.coeffs for lam in trace.functionals])
    return X @ L.T


def audit_trace(trace: GreedyTrace, solver_tol: float | None = None) -> list:
    """Check monotonicity, triangularity, P1, P2 (hilbert) and the entry bound (banach).

    Returns a list of human-readable violations (empty when all hold).
    """
    tol = trace.params.tol if solver_tol is None else solver_tol
    s = np.asarray(trace.sigmas)
    A = trace.A
    g = trace.params.gamma
    N = trace.steps
    problems = []
    if np.any(np.diff(s) > 0):
        problems.append("sigmas are not non-increasing")
    if N and np.abs(np.triu(A, 1)).max() > TAU_DUAL + tol:
        problems.append("A is not lower triangular")
    for n in range(N):
        d = abs(A[n, n])
        if trace.functional_source and trace.functional_source[n] == "zero":
            continue
        if d < g * s[n] - tol or d > s[n] + tol:
            problems.append(f"P1 fails at n={n}: |a_nn|={d:.6g}, sigma_n={s[n]:.6g}")
    if trace.mode == "hilbert":
        for n in range(N):
            for m in range(n, N):
                tail = float(np.sum(A[m, n:m + 1] ** 2))
                if tail > s[n] ** 2 + tol:
                    problems.append(f"P2 fails at n={n}, m={m}")
    else:
        D = trace.per_step_distances
        for i in range(N):
            for j in range(i):
                a = abs(A[i, j])
                if a > D[j, trace.selected[i]] + tol or a > s[j] + tol:
                    problems.append(f"entry bound fails at i={i}, j={j}: {a:.6g} > {s[j]:.6g}")
    return problems
