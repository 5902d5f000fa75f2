"""One-sided (Hestenes) Jacobi singular value decomposition."""
from __future__ import annotations

import numpy as np

__all__ = ["jacobi_svd"]


def jacobi_svd(A, tol: float = 1e-15, max_sweeps: int = 60):
    """Thin SVD ``A = U @ diag(s) @ Vt`` by one-sided Jacobi rotations.

    Columns are rotated pairwise until all are mutually orthogonal to
    relative accuracy ``tol``.  Singular values come out sorted in
    decreasing order; columns of ``U`` belonging to zero singular values
    are left as zero vectors.

    Parameters
    ----------
    A : (m, n) array_like
    tol : float
        Orthogonality threshold ``|a_i . a_j| <= tol * |a_i| |a_j|``.
    max_sweeps : int

    Returns
    -------
    U : (m, k) ndarray
    s : (k,) ndarray
    Vt : (k, n) ndarray
        with ``k = min(m, n)``.
    """
    A = np.array(A, dtype=float)
    m, n = A.shape
    if m < n:
        V, s, Ut = jacobi_svd(A.T, tol, max_sweeps)
        return Ut.T, s, V.T
    W = A.copy()
    V = np.eye(n)
    for _ in range(max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                alpha = W[:, i] @ W[:, i]
                beta = W[:, j] @ W[:, j]
                gamma = W[:, i] @ W[:, j]
                if abs(gamma) <= tol * np.sqrt(alpha * beta) or gamma == 0.0:
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s_ = c * t
                wi, wj = W[:, i].copy(), W[:, j]
                W[:, i] = c * wi - s_ * wj
                W[:, j] = s_ * wi + c * wj
                vi, vj = V[:, i].copy(), V[:, j]
                V[:, i] = c * vi - s_ * vj
                V[:, j] = s_ * vi + c * vj
        if not rotated:
            break
    s = np.linalg.norm(W, axis=0)
    order = np.argsort(-s, kind="stable")
    s = s[order]
    W = W[:, order]
    V = V[:, order]
    U = np.zeros_like(W)
    nz = s > 0
    U[:, nz] = W[:, nz] / s[nz]
    return U, s, V.T
