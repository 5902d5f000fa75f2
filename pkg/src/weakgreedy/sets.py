"""Finite compact sets F used to exercise the weak greedy algorithm."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .seqspace import NormKind, norm

__all__ = [
    "CompactSetSpec",
    "CompactSet",
    "Diagonal",
    "FromMatrix",
    "DyadicBlocks",
    "RandomBall",
    "ParametricSurrogate",
    "realize",
    "dyadic_values",
    "check_p1_p2",
    "tight_sigmas",
    "random_p1p2_matrix",
    "known_widths",
    "named_rng",
    "NORM_SLACK",
]

NORM_SLACK = 1e-12


def named_rng(seed: int, stream: str) -> np.random.Generator:
    """Independent generator for component ``stream`` under master ``seed``."""
    key = [ord(ch) for ch in stream]
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))


@dataclass(frozen=True)
class Diagonal:
    x: tuple

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 1 or x.size == 0:
            raise ValueError("Diagonal needs a non-empty list of values")
        if np.any(x <= 0) or np.any(np.diff(x) > 0):
            raise ValueError("Diagonal values must be positive and non-increasing")
        object.__setattr__(self, "x", tuple(float(v) for v in x))


@dataclass(frozen=True)
class FromMatrix:
    """Rows of a lower-triangular ``A`` realised as set elements.

    ``sigmas`` has one more entry than ``A`` has rows; the last entry is
    the value after every row has been used and must be zero.
    """

    A: tuple
    sigmas: tuple
    gamma: float = 1.0

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        object.__setattr__(self, "A", tuple(map(tuple, A)))
        object.__setattr__(self, "sigmas", tuple(float(s) for s in self.sigmas))

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.A, dtype=float)


@dataclass(frozen=True)
class DyadicBlocks:
    alpha: float
    levels: int

    def __post_init__(self):
        if not self.alpha > 0.5:
            raise ValueError("DyadicBlocks needs alpha > 1/2")
        if self.levels < 0:
            raise ValueError("levels must be non-negative")


@dataclass(frozen=True)
class RandomBall:
    dim: int
    count: int
    seed: int


@dataclass(frozen=True)
class ParametricSurrogate:
    dim: int
    count: int
    mu_range: tuple = (-1.0, 1.0)


CompactSetSpec = Diagonal | FromMatrix | DyadicBlocks | RandomBall | ParametricSurrogate


@dataclass(frozen=True)
class CompactSet:
    elements: np.ndarray  # (count, dim), one element per row
    norm_kind: NormKind
    spec: object = field(default=None, compare=False)

    def __post_init__(self):
        E = np.asarray(self.elements, dtype=float)
        if E.ndim != 2 or E.shape[0] == 0:
            raise ValueError("a compact set needs at least one element")
        if not np.all(np.isfinite(E)):
            raise ValueError("set elements must be finite")
        norms = np.array([norm(e, self.norm_kind) for e in E])
        if norms.max() > 1.0 + NORM_SLACK:
            raise ValueError(f"set is not inside the unit ball (max norm {norms.max():.6g})")
        object.__setattr__(self, "elements", E)

    def __len__(self):
        return self.elements.shape[0]

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    def norms(self) -> np.ndarray:
        return np.array([norm(e, self.norm_kind) for e in self.elements])


def dyadic_values(alpha: float, levels: int) -> np.ndarray:
    """``x_0 = 1`` and ``x_j = 2**(-k*alpha)`` for ``2**(k-1) <= j < 2**k``, ``k <= levels``."""
    x = np.empty(2 ** levels)
    x[0] = 1.0
    for k in range(1, levels + 1):
        x[2 ** (k - 1):2 ** k] = 2.0 ** (-k * alpha)
    return x


def tight_sigmas(A) -> np.ndarray:
    """Smallest sequence compatible with P2: ``max_{m>=n} (sum_{j=n}^m a_mj^2)^(1/2)``.

    Has ``len(A) + 1`` entries, the last one zero.
    """
    A = np.asarray(A, dtype=float)
    K = A.shape[0]
    s = np.zeros(K + 1)
    for n in range(K):
        tails = [np.sqrt(np.sum(A[m, n:m + 1] ** 2)) for m in range(n, K)]
        s[n] = max(tails)
    return s


def check_p1_p2(A, sigmas, gamma: float, tol: float = 1e-14) -> list:
    """Violations of P1 and P2 for a lower-triangular ``A``; empty when valid.

    P1: ``gamma*s_n <= |a_nn| <= s_n``.  P2: ``sum_{j=n}^m a_mj^2 <= s_n^2``.
    """
    A = np.asarray(A, dtype=float)
    s = np.asarray(sigmas, dtype=float)
    K = A.shape[0]
    problems = []
    if np.any(np.abs(np.triu(A, 1)) > tol):
        problems.append("A is not lower triangular")
    for n in range(K):
        d = abs(A[n, n])
        if d < gamma * s[n] - tol or d > s[n] + tol:
            problems.append(f"P1 fails at n={n}: |a_nn|={d:.6g}, sigma={s[n]:.6g}")
        for m in range(n, K):
            tail = float(np.sum(A[m, n:m + 1] ** 2))
            if tail > s[n] ** 2 + tol:
                problems.append(f"P2 fails at n={n}, m={m}: {tail:.6g} > {s[n] ** 2:.6g}")
    return problems


def random_p1p2_matrix(K: int, gamma: float, rng, decay: float = 0.8, fill: float = 0.9):
    """Random lower-triangular matrix satisfying P1/P2 with tight sigmas.

    Row ``m`` gets ``|a_mm| = gamma * s_m`` for ``gamma < 1`` (the weakest
    admissible diagonal), then entries are filled right to left using a
    fraction ``fill`` of the remaining P2 budget.
    """
    s = decay ** np.arange(K)
    A = np.zeros((K, K))
    for m in range(K):
        A[m, m] = s[m] * (gamma if gamma < 1 else 1.0)
        tail = A[m, m] ** 2
        for j in range(m - 1, -1, -1):
            budget = s[j] ** 2 - tail
            room = max(budget, 0.0) * rng.uniform(fill, 1.0)
            A[m, j] = rng.choice([-1.0, 1.0]) * np.sqrt(room)
            tail += A[m, j] ** 2
    return A, tight_sigmas(A)


def _uniform_ball(rng, count, dim, kind: NormKind):
    p = kind.p
    if np.isinf(p):
        return rng.uniform(-1.0, 1.0, size=(count, dim))
    # Barthe-Guedon-Mendelson-Naor: uniform in the l_p ball
    g = rng.gamma(1.0 / p, 1.0, size=(count, dim)) ** (1.0 / p)
    y = g * rng.choice([-1.0, 1.0], size=(count, dim))
    w = rng.exponential(1.0, size=(count, 1))
    return y / (np.sum(np.abs(y) ** p, axis=1, keepdims=True) + w) ** (1.0 / p)


def realize(spec, norm_kind: NormKind) -> CompactSet:
    """Materialise ``spec`` as a :class:`CompactSet` in the norm ``norm_kind``."""
    if isinstance(spec, Diagonal):
        E = np.diag(np.asarray(spec.x))
    elif isinstance(spec, DyadicBlocks):
        E = np.diag(dyadic_values(spec.alpha, spec.levels))
    elif isinstance(spec, FromMatrix):
        A = spec.matrix
        s = np.asarray(spec.sigmas)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("FromMatrix needs a square matrix")
        if s.shape[0] != A.shape[0] + 1 or s[-1] != 0.0:
            raise ValueError("sigmas must decrease to 0: give len(A)+1 values ending in 0")
        if np.any(np.diff(s) > 0):
            raise ValueError("sigmas must be non-increasing")
        problems = check_p1_p2(A, s, spec.gamma)
        if problems:
            raise ValueError("FromMatrix violates P1/P2: " + "; ".join(problems[:3]))
        E = A
    elif isinstance(spec, RandomBall):
        rng = named_rng(spec.seed, "sets.random_ball")
        E = _uniform_ball(rng, spec.count, spec.dim, norm_kind)
    elif isinstance(spec, ParametricSurrogate):
        mu = np.linspace(spec.mu_range[0], spec.mu_range[1], spec.count)
        E = mu[:, None] ** np.arange(spec.dim)[None, :]
        E = E / max(norm(e, norm_kind) for e in E)
    else:
        raise TypeError(f"unknown set spec {spec!r}")
    return CompactSet(E, norm_kind, spec)


def known_widths(spec, n_max: int):
    """Analytic width information, or ``None`` when unavailable.

    For diagonal sets ``d_0 = x_0`` exactly, and the coordinate space
    ``span{e_0..e_{n-1}}`` gives ``d_n <= x_n`` in every l_p norm.
    """
    from .widths import WidthSequence

    if isinstance(spec, Diagonal):
        x = np.asarray(spec.x)
    elif isinstance(spec, DyadicBlocks):
        x = dyadic_values(spec.alpha, spec.levels)
    else:
        return None
    ws = WidthSequence()
    for n in range(n_max + 1):
        value = float(x[n]) if n < x.size else 0.0
        if n == 0 or n >= x.size:
            ws.add(n, value, "exact", "known:max-norm" if n == 0 else "known:full-span")
        else:
            ws.add(n, value, "upper", "known:coordinate-space")
    return ws
