"""Kolmogorov width values and bounds for finite sets.

Every number produced here is tagged ``exact``, ``upper`` or ``lower``.
Upper bounds come from explicit subspaces (coordinate spaces, dominant
singular subspaces, the greedy spaces, block-random subspaces); lower
bounds only from the brute-force search over lines in dimension <= 4.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .approx import Subspace, dist_linf, distance
from .seqspace import NormKind, norm
from .sets import CompactSet, DyadicBlocks, known_widths, named_rng
from .svd import jacobi_svd

__all__ = [
    "WidthSequence",
    "RandomSubspaceResult",
    "width_upper_svd",
    "width_upper_subspace",
    "width_upper_random_subspace",
    "random_block_subspace",
    "width_brute_force",
    "assemble_widths",
    "TAGS",
]

TAGS = ("exact", "upper", "lower")


@dataclass
class WidthSequence:
    """Tagged width values ``(n, value, tag, provenance)``."""

    values: list = field(default_factory=list)

    def add(self, n: int, value: float, tag: str, provenance: str):
        if tag not in TAGS:
            raise ValueError(f"tag must be one of {TAGS}")
        if value < 0 or not np.isfinite(value):
            raise ValueError("width values are finite and non-negative")
        self.values.append((int(n), float(value), tag, provenance))

    def ns(self) -> list:
        return sorted({n for n, *_ in self.values})

    def _pick(self, n, tags, best):
        vals = [(v, prov) for m, v, t, prov in self.values if m == n and t in tags]
        if not vals:
            return None
        return best(vals, key=lambda vp: vp[0])

    def upper(self, n: int) -> float:
        """Tightest upper bound on ``d_n`` (exact values count as bounds)."""
        got = self._pick(n, ("upper", "exact"), min)
        if got is None:
            raise KeyError(f"no upper bound for d_{n}")
        return got[0]

    def lower(self, n: int) -> float:
        got = self._pick(n, ("lower", "exact"), max)
        return 0.0 if got is None else got[0]

    def has_upper(self, n: int) -> bool:
        return self._pick(n, ("upper", "exact"), min) is not None

    def upper_provenance(self, n: int) -> str:
        return self._pick(n, ("upper", "exact"), min)[1]

    def as_upper_array(self, n_max: int) -> np.ndarray:
        return np.array([self.upper(n) for n in range(n_max + 1)])

    def rows(self):
        """CSV rows ``(n, value, tag, method)`` sorted by ``n`` then tag."""
        order = {t: i for i, t in enumerate(TAGS)}
        return sorted(self.values, key=lambda r: (r[0], order[r[2]], r[3]))


def _element_matrix_svd(F: CompactSet):
    U, s, _ = jacobi_svd(F.elements.T)
    return U, s


def width_upper_subspace(F: CompactSet, basis, tol: float = 1e-9) -> float:
    """``max_f dist(f, span(basis))`` in the norm of ``F``; an upper bound on ``d_{dim}``."""
    B = np.asarray(basis, dtype=float).reshape(-1, F.dim)
    if B.shape[0] == 0:
        return float(F.norms().max())
    V = Subspace.span(B)
    if F.norm_kind.name == "hilbert":
        Q = V.ortho
        R = F.elements - (F.elements @ Q.T) @ Q
        return float(np.linalg.norm(R, axis=1).max())
    return max(distance(f, V, F.norm_kind, tol).distance for f in F.elements)


def width_upper_svd(F: CompactSet, n: int, tol: float = 1e-9, svd=None) -> float:
    """Worst distance from ``F`` to its top-``n`` left singular subspace.

    Distances are measured in ``F.norm_kind``; for the Euclidean norm this
    is the classical snapshot (POD) bound.  ``svd`` may carry a
    precomputed ``(U, s)`` of the element matrix.
    """
    if n == 0:
        return float(F.norms().max())
    U, s = _element_matrix_svd(F) if svd is None else svd
    rank = int(np.sum(s > 1e-13 * max(1.0, s[0])))
    if n >= rank:
        return 0.0
    return width_upper_subspace(F, U[:, :n].T, tol)


def random_block_subspace(dim: int, n_level: int, rng) -> np.ndarray:
    """Spanning vectors of the block-random space used for dyadic sets.

    Coordinate vectors ``e_0..e_{2^n-1}``, then for ``k = 1..n`` a random
    Gaussian space of dimension ``2^(n-k)`` supported on the block
    ``[2^(n+k-1), 2^(n+k) - 1]`` (the block carrying ``2^(-(n+k) alpha)``).
    Blocks that start beyond ``dim`` are skipped.
    """
    n = n_level
    rows = []
    for j in range(min(2 ** n, dim)):
        e = np.zeros(dim)
        e[j] = 1.0
        rows.append(e)
    for k in range(1, n + 1):
        lo, hi = 2 ** (n + k - 1), 2 ** (n + k)
        if lo >= dim:
            break
        hi = min(hi, dim)
        G = rng.standard_normal((2 ** (n - k), hi - lo))
        for g in G:
            v = np.zeros(dim)
            v[lo:hi] = g / np.linalg.norm(g)
            rows.append(v)
    return np.array(rows)


@dataclass
class RandomSubspaceResult:
    n_level: int
    N: int  # nominal dimension budget 2^(n+1)
    span_dim: int
    trials: list  # per-trial max distance
    tail: float  # largest element value not reached by any block

    @property
    def best(self) -> float:
        return float(min(self.trials))

    @property
    def median(self) -> float:
        return float(np.median(self.trials))


def width_upper_random_subspace(F: CompactSet, n_level: int, trials: int = 16, seed: int = 0,
                                tol: float = 1e-9, jobs: int = 1) -> RandomSubspaceResult:
    """Upper bounds on ``d_N(F)`` in l_inf, ``N = 2^(n_level+1)``, from random block subspaces.

    ``F`` must be a realised :class:`DyadicBlocks` set in ``linf``.  Each
    trial draws a fresh subspace from a per-trial stream of ``seed``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not isinstance(F.spec, DyadicBlocks) or F.norm_kind.name != "linf":
        raise ValueError("random-subspace widths need a DyadicBlocks set in linf")
    reach = 2 ** (2 * n_level)
    tail = float(np.diag(F.elements)[reach:].max(initial=0.0))
    args = [(F, n_level, seed, t, tol) for t in range(trials)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(jobs) as ex:
            out = list(ex.map(_one_trial, args))
    else:
        out = [_one_trial(a) for a in args]
    return RandomSubspaceResult(
        n_level=n_level,
        N=2 ** (n_level + 1),
        span_dim=out[0][1],
        trials=[float(v) for v, _ in out],
        tail=tail,
    )


def _one_trial(args):
    F, n_level, seed, t, tol = args
    # elements past 2^(2n) lie beyond the last block and keep their full norm
    reach = 2 ** (2 * n_level)
    rng = named_rng(seed, f"widths.random_subspace.n{n_level}.t{t}")
    E = random_block_subspace(F.dim, n_level, rng)
    V = Subspace(E)
    worst = float(np.diag(F.elements)[reach:].max(initial=0.0))
    for j in range(min(reach, F.dim)):
        worst = max(worst, dist_linf(F.elements[j], V, tol).distance)
    return worst, E.shape[0]


# ---------------------------------------------------------------------------
# brute force over lines (n = 1, dim <= 4)


def _line_distances(f, U, kind: NormKind) -> np.ndarray:
    """``min_c ||f - c u||`` for every row ``u`` of ``U`` (unit Euclidean rows)."""
    p = kind.p
    if p == 2.0:
        R = f[None, :] - (U @ f)[:, None] * U
        return np.sqrt(np.sum(R * R, axis=1))
    if p == 1.0 or np.isinf(p):
        # convex piecewise linear in c: the optimum sits at a breakpoint
        cands = [np.zeros(len(U))]
        for i in range(f.size):
            cands.append(np.divide(f[i], U[:, i], out=np.zeros(len(U)), where=U[:, i] != 0))
        if np.isinf(p):
            for i, k in itertools.combinations(range(f.size), 2):
                for sgn in (1.0, -1.0):
                    den = U[:, i] - sgn * U[:, k]
                    cands.append(np.divide(f[i] - sgn * f[k], den, out=np.zeros(len(U)), where=den != 0))
        C = np.stack(cands, axis=1)
        R = np.abs(f[None, None, :] - C[:, :, None] * U[:, None, :])
        vals = R.sum(axis=2) if p == 1.0 else R.max(axis=2)
        return vals.min(axis=1)
    # strictly convex in c: golden-section search on |c| <= 2 ||f|| / ||u||
    def obj(c):
        R = np.abs(f[None, :] - c[:, None] * U)
        s = R.max(axis=1)
        safe = np.where(s > 0, s, 1.0)
        return np.where(s > 0, s * np.sum((R / safe[:, None]) ** p, axis=1) ** (1.0 / p), 0.0)

    nu = np.sum(np.abs(U) ** p, axis=1) ** (1.0 / p)
    b = 2.0 * norm(f, kind) / nu
    a = -b
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    x1, x2 = b - phi * (b - a), a + phi * (b - a)
    f1, f2 = obj(x1), obj(x2)
    for _ in range(90):
        left = f1 < f2
        b = np.where(left, x2, b)
        a = np.where(left, a, x1)
        x2n = np.where(left, x1, a + phi * (b - a))
        x1n = np.where(left, b - phi * (b - a), x2)
        x1, x2 = x1n, x2n
        f1, f2 = obj(x1), obj(x2)
    return np.minimum(np.minimum(f1, f2), norm(f, kind))


def _directions(dim: int, grid: int):
    """Unit vectors on an angular grid covering all lines, and the covering radius."""
    if dim == 1:
        return np.ones((1, 1)), 0.0
    phi = np.arange(grid) * np.pi / grid
    if dim == 2:
        return np.stack([np.cos(phi), np.sin(phi)], axis=1), np.pi / (2 * grid)
    theta = np.linspace(0.0, np.pi, grid)
    h_theta = np.pi / (2 * (grid - 1))
    if dim == 3:
        T, P = np.meshgrid(theta, phi, indexing="ij")
        U = np.stack([np.cos(T), np.sin(T) * np.cos(P), np.sin(T) * np.sin(P)], axis=-1)
        return U.reshape(-1, 3), h_theta + np.pi / (2 * grid)
    T1, T2, P = np.meshgrid(theta, theta, phi, indexing="ij")
    U = np.stack([
        np.cos(T1),
        np.sin(T1) * np.cos(T2),
        np.sin(T1) * np.sin(T2) * np.cos(P),
        np.sin(T1) * np.sin(T2) * np.sin(P),
    ], axis=-1)
    return U.reshape(-1, 4), 2 * h_theta + np.pi / (2 * grid)


def width_brute_force(F: CompactSet, n: int = 1, grid: int = 64):
    """Grid search over lines for ``d_1(F)``; returns ``(lower, upper)``.

    ``upper`` is the best line found.  ``lower`` subtracts the Lipschitz
    slack ``2 R kappa delta`` where ``delta`` is the covering radius of the
    direction grid, ``R`` the largest element norm and ``kappa`` the
    equivalence constant between the set norm and the Euclidean norm.
    """
    if n != 1:
        raise ValueError("brute force is implemented for n = 1 only")
    if F.dim > 4:
        raise ValueError("brute force needs ambient dimension <= 4")
    U, delta = _directions(F.dim, grid)
    kind = F.norm_kind
    worst = np.zeros(len(U))
    for f in F.elements:
        worst = np.maximum(worst, _line_distances(f, U, kind))
    best = float(worst.min())
    s = F.dim
    p = kind.p
    expo = 0.5 if np.isinf(p) else abs(1.0 / p - 0.5)
    kappa = s ** expo
    R = float(F.norms().max())
    slack = 2.0 * R * kappa * delta
    return max(best - slack, 0.0), best


def assemble_widths(F: CompactSet, n_max: int, methods=(), trace=None, grid: int = 64,
                    tol: float = 1e-9) -> WidthSequence:
    """Merge width information from several sources into one sequence.

    ``methods`` may contain ``known`` (analytic, diagonal sets), ``svd``
    (dominant singular subspace evaluated in the set's norm), ``greedy``
    (the greedy spaces of ``trace``: ``d_n <= sigma_n``) and ``brute``
    (``n = 1`` grid search, dim <= 4).  ``d_0`` is always recorded exactly.
    Upper bounds are then made non-increasing (``d_n <= d_m`` for
    ``m <= n``) and lower bounds non-increasing from the right.
    """
    raw = WidthSequence()
    raw.add(0, float(F.norms().max()), "exact", "max-norm")
    methods = list(methods)
    for method in methods:
        if method == "known":
            ws = known_widths(F.spec, n_max)
            if ws is not None:
                raw.values.extend(ws.values)
        elif method == "svd":
            svd = _element_matrix_svd(F)
            for n in range(1, n_max + 1):
                raw.add(n, width_upper_svd(F, n, tol, svd), "upper", "svd")
        elif method == "greedy":
            if trace is None:
                raise ValueError("the greedy method needs a trace")
            for n in range(1, n_max + 1):
                if n < len(trace.sigmas) or trace.terminated:
                    raw.add(n, trace.sigma(n), "upper", "greedy")
        elif method == "brute":
            if F.dim <= 4 and n_max >= 1:
                lo, up = width_brute_force(F, 1, grid)
                raw.add(1, up, "upper", "brute")
                raw.add(1, lo, "lower", "brute")
        else:
            raise ValueError(f"unknown width method {method!r}")

    out = WidthSequence()
    best_up, best_prov = np.inf, None
    uppers = {}
    for n in range(n_max + 1):
        got = raw._pick(n, ("upper", "exact"), min)
        if got is not None and got[0] < best_up:
            best_up, best_prov = got
        if got is not None:
            uppers[n] = (best_up, best_prov)
    lowers = {}
    best_lo, lo_prov = 0.0, None
    for n in range(n_max, -1, -1):
        got = raw._pick(n, ("lower", "exact"), max)
        if got is not None and got[0] > best_lo:
            best_lo, lo_prov = got
        if lo_prov is not None:
            lowers[n] = (best_lo, lo_prov)
    for n in range(n_max + 1):
        exact = raw._pick(n, ("exact",), min)
        if exact is not None:
            out.add(n, exact[0], "exact", exact[1])
            continue
        if n in uppers:
            out.add(n, uppers[n][0], "upper", uppers[n][1])
        if n in lowers:
            lo = min(lowers[n][0], uppers[n][0]) if n in uppers else lowers[n][0]
            out.add(n, lo, "lower", lowers[n][1])
    return out
