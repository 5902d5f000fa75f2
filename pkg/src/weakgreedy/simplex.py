"""Small dense two-phase simplex method with Bland's anti-cycling rule.

Solves ``min c @ x  s.t.  A @ x = b, x >= 0`` and returns both the primal
solution and the equality multipliers ``y`` (``A.T @ y <= c`` at the
optimum, ``b @ y == c @ x``).  Problems in this package have at most a few
hundred columns, so a full tableau is kept and robustness wins over speed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LPError", "LPResult", "linprog_eq"]


class LPError(RuntimeError):
    """Raised when an LP is infeasible, unbounded or hits the iteration cap."""


@dataclass
class LPResult:
    x: np.ndarray
    y: np.ndarray
    fun: float
    nit: int


def _pivot(T, r, j):
    T[r] /= T[r, j]
    col = T[:, j].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _run(T, basis, cost_row, allowed, tol, max_iter, nit):
    """Bland's rule iterations on tableau ``T`` with objective row ``cost_row``.

    ``cost_row`` holds reduced costs for the structural columns and is
    updated in place alongside ``T``.
    """
    while True:
        cand = np.flatnonzero((cost_row < -tol) & allowed)
        if cand.size == 0:
            return nit
        if nit >= max_iter:
            raise LPError(f"simplex iteration cap {max_iter} reached")
        j = int(cand[0])
        col = T[:, j]
        rows = np.flatnonzero(col > tol)
        if rows.size == 0:
            raise LPError("LP is unbounded")
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol * max(1.0, abs(best))]
        # Bland: among tied rows leave the smallest basic index
        r = int(ties[np.argmin([basis[i] for i in ties])])
        cost_row -= cost_row[j] * T[r, :-1] / T[r, j]
        _pivot(T, r, j)
        basis[r] = j
        nit += 1


def linprog_eq(c, A, b, tol: float = 1e-11, max_iter: int = 100_000) -> LPResult:
    """Solve ``min c@x s.t. A@x = b, x >= 0``.

    Parameters
    ----------
    c : (n,) array
    A : (m, n) array
    b : (m,) array
    tol : float
        Pivot and reduced-cost tolerance, applied to data scaled so that
        the largest entry of ``A`` is of order one.
    max_iter : int
        Total pivot cap over both phases.

    Returns
    -------
    LPResult
        ``x`` optimal vertex, ``y`` equality multipliers, ``fun`` optimal
        value, ``nit`` pivot count.
    """
    c = np.asarray(c, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    if A.size == 0:
        m = b.shape[0]
        A = A.reshape(m, n)
    if c.shape != (n,) or b.shape != (m,):
        raise ValueError("inconsistent LP dimensions")

    sign = np.where(b < 0, -1.0, 1.0)
    A = A * sign[:, None]
    b = b * sign

    # tableau: structural | identity (tracks B^-1, doubles as artificials) | rhs
    T = np.zeros((m, n + m + 1))
    T[:, :n] = A
    T[:, n:n + m] = np.eye(m)
    T[:, -1] = b

    basis = [n + i for i in range(m)]
    artificial = np.ones(m, dtype=bool)
    # reuse natural unit columns (slacks) as the starting basis where possible
    for j in range(n):
        colj = A[:, j]
        nz = np.flatnonzero(colj)
        if nz.size == 1 and colj[nz[0]] == 1.0 and artificial[nz[0]]:
            i = int(nz[0])
            basis[i] = j
            artificial[i] = False
    # natural unit columns agree with the identity block, so B = I holds

    allowed = np.zeros(n + m, dtype=bool)
    allowed[:n] = True
    nit = 0

    if artificial.any():
        # phase 1: minimise the sum of basic artificials
        cost1 = np.zeros(n + m)
        cost1[n:][artificial] = 1.0
        red = cost1 - cost1[basis] @ T[:, :-1]
        nit = _run(T, basis, red, allowed, tol, max_iter, nit)
        infeas = float(T[[i for i in range(m) if basis[i] >= n], -1].sum()) if m else 0.0
        if infeas > 1e3 * tol * max(1.0, np.abs(b).max(initial=0.0)):
            raise LPError("LP is infeasible")
        # drive zero-level artificials out of the basis where possible
        for i in range(m):
            if basis[i] >= n:
                row = T[i, :n]
                cand = np.flatnonzero(np.abs(row) > 1e3 * tol)
                if cand.size:
                    _pivot(T, i, int(cand[0]))
                    basis[i] = int(cand[0])
                else:
                    T[i, -1] = 0.0

    cost = np.zeros(n + m)
    cost[:n] = c
    red = cost - cost[basis] @ T[:, :-1]
    nit = _run(T, basis, red, allowed, tol, max_iter, nit)

    x = np.zeros(n + m)
    x[basis] = T[:, -1]
    x = x[:n]
    x[x < 0] = 0.0
    # y^T = c_B^T B^{-1}; undo the row flips
    y = (cost[basis] @ T[:, n:n + m]) * sign
    return LPResult(x=x, y=y, fun=float(c @ x), nit=nit)
