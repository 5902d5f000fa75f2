"""Best approximation from finite-dimensional subspaces of l_p.

``dist_hilbert`` projects onto an orthonormal basis; ``dist_lp`` runs a
damped Newton iteration on the smooth convex objective; ``dist_linf`` and
``dist_l1`` are linear programs solved with :mod:`weakgreedy.simplex`.
The LP solvers also return the optimal dual vector, a unit-norm functional
that vanishes on the subspace and attains the distance.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .seqspace import NormKind, as_vector, norm
from .simplex import LPError, linprog_eq

__all__ = [
    "Subspace",
    "ApproxResult",
    "SolverError",
    "TAU_RANK",
    "DEFAULT_TOL",
    "MAX_ITER",
    "gram_schmidt_extend",
    "dist_hilbert",
    "dist_linf",
    "dist_lp",
    "dist_l1",
    "distance",
]

TAU_RANK = 1e-10
DEFAULT_TOL = 1e-9
MAX_ITER = 100_000


class SolverError(RuntimeError):
    """A distance solver failed (LP failure or iteration cap)."""


def gram_schmidt_extend(ortho, f):
    """Extend an orthonormal family by ``f``.

    Parameters
    ----------
    ortho : (r, dim) array or sequence of vectors
        Orthonormal rows.
    f : (dim,) array

    Returns
    -------
    q : (dim,) array or None
        Normalised residual, or ``None`` when ``f`` is dependent (residual
        norm at most ``TAU_RANK``).
    coeffs : (r,) array
        ``<f, q_j>`` for the existing rows.
    """
    f = as_vector(f)
    Q = np.asarray(ortho, dtype=float).reshape(-1, f.shape[0])
    a = Q @ f
    r = f - Q.T @ a
    # reorthogonalise once ("twice is enough")
    a2 = Q @ r
    r = r - Q.T @ a2
    a = a + a2
    nr = np.linalg.norm(r)
    if nr <= TAU_RANK * max(1.0, np.linalg.norm(f)):
        return None, a
    return r / nr, a


@dataclass(frozen=True)
class Subspace:
    """Span of the rows of ``basis``; ``ortho`` optionally holds an orthonormal basis."""

    basis: np.ndarray
    ortho: np.ndarray | None = None

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=float)
        if B.ndim != 2:
            raise ValueError("basis must be a 2-D array of row vectors")
        object.__setattr__(self, "basis", B)
        if self.ortho is not None:
            Q = np.asarray(self.ortho, dtype=float).reshape(-1, B.shape[1])
            G = Q @ Q.T
            if not np.allclose(G, np.eye(Q.shape[0]), rtol=0.0, atol=1e-12):
                raise ValueError("ortho rows are not orthonormal")
            object.__setattr__(self, "ortho", Q)

    @classmethod
    def empty(cls, dim: int) -> "Subspace":
        return cls(np.zeros((0, dim)), np.zeros((0, dim)))

    @classmethod
    def span(cls, vectors, dim: int | None = None) -> "Subspace":
        """Subspace spanned by ``vectors`` with an orthonormal basis attached."""
        B = np.asarray(vectors, dtype=float)
        if B.size == 0:
            if dim is None and B.ndim == 2:
                dim = B.shape[1]
            if dim is None:
                raise ValueError("dim is required for an empty span")
            return cls.empty(dim)
        B = B.reshape(len(B), -1)
        Q = np.zeros((0, B.shape[1]))
        for v in B:
            q, _ = gram_schmidt_extend(Q, v)
            if q is not None:
                Q = np.vstack([Q, q])
        return cls(B, Q)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def dim_span(self) -> int:
        if self.ortho is not None:
            return self.ortho.shape[0]
        if self.basis.shape[0] == 0:
            return 0
        return int(np.linalg.matrix_rank(self.basis))

    def __len__(self):
        return self.basis.shape[0]


@dataclass
class ApproxResult:
    """Distance, best coefficients in ``V.basis`` and the residual.

    ``dual`` is filled by the LP solvers: an annihilating functional of
    unit dual norm with ``dual @ f`` equal to the distance (up to ``gap``).
    """

    distance: float
    best_coeffs: np.ndarray
    residual: np.ndarray
    dual: np.ndarray | None = None
    gap: float = 0.0
    iterations: int = 0
    extra: dict = field(default_factory=dict)


def _result(f, B, c, kind, **kw):
    residual = f - B.T @ c
    return ApproxResult(norm(residual, kind), c, residual, **kw)


def dist_hilbert(f, V: Subspace) -> ApproxResult:
    """Euclidean distance from ``f`` to ``V`` by orthogonal projection."""
    f = as_vector(f, V.dim)
    if V.ortho is None:
        raise ValueError("dist_hilbert needs a subspace with an orthonormal basis")
    Q = V.ortho
    a = Q @ f
    proj = Q.T @ a
    a2 = Q @ (f - proj)
    proj = proj + Q.T @ a2
    B = V.basis
    if B.shape[0] == 0:
        c = np.zeros(0)
    elif B.shape == Q.shape and np.array_equal(B, Q):
        c = a + a2
    else:
        c = np.linalg.lstsq(B.T, proj, rcond=None)[0]
    residual = f - proj
    return ApproxResult(float(np.linalg.norm(residual)), c, residual)


# ---------------------------------------------------------------------------
# separable structure: independent blocks of coordinates


def _blocks(f, B):
    """Split the problem into independent coordinate blocks.

    Returns ``(pieces, free)`` where each piece is ``(coords, rows)`` and
    ``free`` are coordinates no basis vector touches.  Residual coordinates
    in different pieces are driven by disjoint sets of coefficients, so the
    minimisation separates.
    """
    k, s = B.shape
    support = B != 0
    used = support.any(axis=0)
    free = np.flatnonzero(~used & (f != 0))
    if k == 0 or not np.any(f[used]):
        # nothing for the coefficients to fit: c = 0 is optimal
        return [], free
    rows, cols = np.nonzero(support)
    # bipartite graph: nodes 0..k-1 basis rows, k..k+s-1 coordinates
    g = coo_matrix((np.ones(rows.size), (rows, k + cols)), shape=(k + s, k + s))
    ncomp, labels = connected_components(g, directed=False)
    pieces = []
    for comp in np.unique(labels[:k]):
        r = np.flatnonzero(labels[:k] == comp)
        c = np.flatnonzero(labels[k:] == comp)
        pieces.append((c, r))
    return pieces, free


def _separable(f, V, kind, core, tol):
    """Solve piece by piece with ``core`` and recombine for ``kind``."""
    f = as_vector(f, V.dim)
    B = V.basis
    k = B.shape[0]
    pieces, free = _blocks(f, B)
    c = np.zeros(k)
    dual = np.zeros_like(f)
    parts = []  # (distance, coords, dual on coords)
    gap = 0.0
    nit = 0
    for coords, rows in pieces:
        fc = f[coords]
        if not np.any(fc):
            continue
        res = core(fc, B[np.ix_(rows, coords)], tol)
        c[rows] = res.best_coeffs
        parts.append((res.distance, coords, res.dual))
        gap = max(gap, res.gap)
        nit += res.iterations
    if free.size:
        parts.append((norm(f[free], kind), free, None))
    out = _result(f, B, c, kind, gap=gap, iterations=nit)
    if kind.name == "linf":
        if parts:
            d, coords, y = max(parts, key=lambda t: t[0])
            if d > 0:
                if y is None:
                    i = coords[int(np.argmax(np.abs(f[coords])))]
                    dual[i] = np.sign(f[i])
                else:
                    dual[coords] = y
    else:  # l1: stitch the pieces together
        for d, coords, y in parts:
            dual[coords] = np.sign(f[coords]) if y is None else y
    out.dual = dual
    return out


def _linf_core(f, B, tol):
    # dual LP: max f@y  s.t.  B@y = 0, ||y||_1 <= 1  with y = yp - ym
    k, s = B.shape
    A = np.zeros((k + 1, 2 * s + 1))
    A[:k, :s] = B
    A[:k, s:2 * s] = -B
    A[k, :] = 1.0
    b = np.zeros(k + 1)
    b[k] = 1.0
    cost = np.concatenate([-f, f, [0.0]])
    try:
        lp = linprog_eq(cost, A, b, max_iter=MAX_ITER)
    except LPError as exc:
        raise SolverError(f"l_inf distance LP failed: {exc}") from exc
    y = lp.x[:s] - lp.x[s:2 * s]
    # multipliers of the equality rows give the primal coefficients
    c = -lp.y[:k]
    residual = f - B.T @ c
    primal = float(np.abs(residual).max())
    dual_val = float(f @ y)
    return ApproxResult(primal, c, residual, dual=y, gap=primal - dual_val, iterations=lp.nit)


def _l1_core(f, B, tol):
    # primal LP: min sum(p + q)  s.t.  B.T@(cp - cm) + p - q = f
    k, s = B.shape
    A = np.hstack([B.T, -B.T, np.eye(s), -np.eye(s)])
    cost = np.concatenate([np.zeros(2 * k), np.ones(2 * s)])
    try:
        lp = linprog_eq(cost, A, f, max_iter=MAX_ITER)
    except LPError as exc:
        raise SolverError(f"l_1 distance LP failed: {exc}") from exc
    c = lp.x[:k] - lp.x[k:2 * k]
    residual = f - B.T @ c
    primal = float(np.abs(residual).sum())
    y = np.clip(lp.y, -1.0, 1.0)
    return ApproxResult(primal, c, residual, dual=y, gap=primal - float(f @ y), iterations=lp.nit)


def _check_gap(res, tol, what):
    if res.gap > tol:
        raise SolverError(f"{what}: duality gap {res.gap:.3e} exceeds tolerance {tol:.1e}")
    return res


def dist_linf(f, V: Subspace, tol: float = DEFAULT_TOL) -> ApproxResult:
    """Sup-norm distance; the returned value is a primal feasible objective.

    The dual certificate bounds it from below, and the two differ by at
    most ``tol``.
    """
    res = _separable(f, V, NormKind.linf(), _linf_core, tol)
    return _check_gap(res, tol, "dist_linf")


def dist_l1(f, V: Subspace, tol: float = DEFAULT_TOL) -> ApproxResult:
    res = _separable(f, V, NormKind.l1(), _l1_core, tol)
    return _check_gap(res, tol, "dist_l1")


def _newton_lp(f, B, p, tol, max_iter):
    """Minimise ``||f - B.T@c||_p`` by damped Newton on ``||r||_p^p / p``.

    The iteration runs in an orthonormal basis of the row span of ``B`` so
    that the gradient tolerance does not depend on the scaling of ``B``.
    """
    kind = NormKind.lp(p)
    fscale = norm(f, kind)
    U, sv, _ = np.linalg.svd(B.T, full_matrices=False)
    Q = U[:, sv > TAU_RANK * max(1.0, sv.max(initial=0.0))].T
    k = Q.shape[0]
    z = Q @ f  # least-squares start

    def objective(z):
        return norm(f - Q.T @ z, kind)

    val = objective(z)
    it = 0
    stalled = 0
    while k:
        r = f - Q.T @ z
        nr = norm(r, kind)
        # the norm is not differentiable at 0; roundoff-level residuals are converged
        if nr <= 1e-14 * max(1.0, fscale):
            break
        u = r / nr
        lam = np.sign(u) * np.abs(u) ** (p - 1.0)
        grad = -(Q @ lam)  # gradient of ||r||_p in z
        if np.linalg.norm(grad) <= tol or stalled >= 20:
            break
        if it >= max_iter:
            raise SolverError(f"dist_lp: iteration cap {max_iter} reached (|grad|={np.linalg.norm(grad):.2e})")
        w = np.maximum(np.abs(u), 1e-12) ** (p - 2.0)
        H = (p - 1.0) * (Q * w) @ Q.T
        H += (1e-14 * np.trace(H) + 1e-300) * np.eye(k)
        try:
            step = np.linalg.solve(H, -grad) * nr
        except np.linalg.LinAlgError:
            step = -grad * nr
        if not step @ grad < 0:
            step = -grad * nr
        t = 1.0
        while t > 1e-16:
            cand = z + t * step
            v = objective(cand)
            if v <= val + 1e-4 * t * (grad @ step):
                break
            t *= 0.5
        else:
            # no decrease representable in floating point
            break
        # count steps that no longer move the objective at working precision
        stalled = stalled + 1 if val - v <= 4e-16 * val else 0
        z, val = cand, v
        it += 1
    g = Q.T @ z
    c = np.linalg.lstsq(B.T, g, rcond=None)[0] if B.shape[0] else np.zeros(0)
    residual = f - B.T @ c
    return ApproxResult(norm(residual, kind), c, residual, iterations=it)


def dist_lp(f, V: Subspace, p: float, tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER) -> ApproxResult:
    """l_p distance for ``1 < p < inf``, started at the least-squares fit."""
    if not 1.0 < p < np.inf:
        raise ValueError("dist_lp needs 1 < p < inf")
    kind = NormKind.lp(p)
    f = as_vector(f, V.dim)
    B = V.basis
    pieces, free = _blocks(f, B)
    c = np.zeros(B.shape[0])
    nit = 0
    for coords, rows in pieces:
        fc = f[coords]
        if not np.any(fc):
            continue
        res = _newton_lp(fc, B[np.ix_(rows, coords)], p, tol, max_iter)
        c[rows] = res.best_coeffs
        nit += res.iterations
    return _result(f, B, c, kind, iterations=nit)


def distance(f, V: Subspace, kind: NormKind, tol: float = DEFAULT_TOL) -> ApproxResult:
    """Dispatch to the solver for ``kind``.

    ``hilbert`` uses the orthogonal projection when ``V.ortho`` is present.
    """
    if kind.name == "hilbert":
        if V.ortho is not None:
            return dist_hilbert(f, V)
        return dist_lp(f, V, 2.0, tol)
    if kind.name == "lp":
        return dist_lp(f, V, kind.p, tol)
    if kind.name == "linf":
        return dist_linf(f, V, tol)
    return dist_l1(f, V, tol)
