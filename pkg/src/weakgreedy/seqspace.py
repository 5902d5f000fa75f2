"""Vectors, norms and norming functionals on finite sections of l_p.

Vectors are plain one-dimensional float64 numpy arrays; :func:`as_vector`
is the single validation gate (finite entries, one axis).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "NormKind",
    "Functional",
    "as_vector",
    "basis_vector",
    "norm",
    "dual_norm",
    "inner",
    "norming_functional",
    "TAU_DUAL",
]

TAU_DUAL = 1e-10


@dataclass(frozen=True)
class NormKind:
    """One of ``hilbert``, ``lp``, ``l1`` or ``linf``.

    ``hilbert`` is the Euclidean norm together with its inner product;
    ``lp`` carries a finite exponent strictly between 1 and infinity.
    """

    name: str
    exponent: float | None = None

    def __post_init__(self):
        if self.name not in ("hilbert", "lp", "l1", "linf"):
            raise ValueError(f"unknown norm kind {self.name!r}")
        if self.name == "lp":
            if self.exponent is None or not np.isfinite(self.exponent) or not 1.0 < self.exponent:
                raise ValueError("lp exponent must be finite and in (1, inf)")
        elif self.exponent is not None:
            raise ValueError(f"{self.name} takes no exponent")

    @classmethod
    def hilbert(cls) -> "NormKind":
        return cls("hilbert")

    @classmethod
    def lp(cls, p: float) -> "NormKind":
        return cls("lp", float(p))

    @classmethod
    def l1(cls) -> "NormKind":
        return cls("l1")

    @classmethod
    def linf(cls) -> "NormKind":
        return cls("linf")

    @classmethod
    def parse(cls, text: str) -> "NormKind":
        """Parse ``hilbert``, ``l1``, ``linf``/``inf`` or ``l<p>``/``lp:<p>``."""
        t = text.strip().lower()
        if t in ("hilbert", "l2", "h"):
            return cls.hilbert()
        if t == "l1":
            return cls.l1()
        if t in ("linf", "inf", "l_inf"):
            return cls.linf()
        for prefix in ("lp:", "lp", "l"):
            if t.startswith(prefix):
                try:
                    return cls.lp(float(t[len(prefix):]))
                except ValueError:
                    break
        raise ValueError(f"cannot parse norm kind {text!r}")

    @property
    def p(self) -> float:
        """The exponent, with hilbert -> 2, l1 -> 1 and linf -> inf."""
        if self.name == "hilbert":
            return 2.0
        if self.name == "l1":
            return 1.0
        if self.name == "linf":
            return np.inf
        return self.exponent

    @property
    def is_smooth(self) -> bool:
        return self.name in ("hilbert", "lp")

    def dual(self) -> "NormKind":
        if self.name == "hilbert":
            return self
        if self.name == "l1":
            return NormKind.linf()
        if self.name == "linf":
            return NormKind.l1()
        q = self.exponent / (self.exponent - 1.0)
        return NormKind.lp(q)

    def label(self) -> str:
        if self.name == "lp":
            return f"l{self.exponent:g}"
        return self.name

    def __str__(self):
        return self.label()


def as_vector(v, dim: int | None = None) -> np.ndarray:
    """Return ``v`` as a finite 1-D float array, optionally checking its length."""
    a = np.asarray(v, dtype=float)
    if a.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise ValueError(f"dimension mismatch: {a.shape[0]} != {dim}")
    if not np.all(np.isfinite(a)):
        raise ValueError("vector has non-finite entries")
    return a


def basis_vector(j: int, dim: int) -> np.ndarray:
    e = np.zeros(dim)
    e[j] = 1.0
    return e


def norm(v, kind: NormKind) -> float:
    v = as_vector(v)
    if v.size == 0:
        return 0.0
    p = kind.p
    if p == 1.0:
        return float(np.abs(v).sum())
    s = np.abs(v).max()
    if np.isinf(p) or s == 0.0:
        return float(s)
    # scale first so that |v|^p neither overflows nor underflows
    w = np.abs(v) / s
    if p == 2.0:
        return float(s * np.sqrt(w @ w))
    return float(s * np.sum(w ** p) ** (1.0 / p))


def dual_norm(v, kind: NormKind) -> float:
    """Norm of ``v`` viewed as a functional on the space with norm ``kind``."""
    return norm(v, kind.dual())


def inner(u, v) -> float:
    u = as_vector(u)
    v = as_vector(v, u.shape[0])
    return float(u @ v)


@dataclass(frozen=True)
class Functional:
    """A linear functional ``x -> coeffs @ x``.

    ``kind`` is the norm of the dual space in which ``coeffs`` is measured.
    """

    coeffs: np.ndarray
    kind: NormKind

    def __call__(self, x) -> float:
        return float(self.coeffs @ as_vector(x, self.coeffs.shape[0]))

    @property
    def norm(self) -> float:
        return norm(self.coeffs, self.kind)


def norming_functional(r, kind: NormKind) -> Functional:
    """Unit-norm functional ``lam`` with ``lam(r) = ||r||``.

    Ties in the sup norm go to the smallest index; ``sign(0) = 0`` in the
    l1 case.
    """
    r = as_vector(r)
    nr = norm(r, kind)
    if nr == 0.0:
        raise ValueError("norming functional of the zero vector is undefined")
    p = kind.p
    if p == 2.0:
        lam = r / nr
    elif p == 1.0:
        lam = np.sign(r)
    elif np.isinf(p):
        i = int(np.argmax(np.abs(r)))
        lam = np.zeros_like(r)
        lam[i] = np.sign(r[i])
    else:
        a = np.abs(r) / nr
        lam = np.sign(r) * a ** (p - 1.0)
    return Functional(lam, kind.dual())
