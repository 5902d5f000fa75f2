"""Executable forms of the sigma/width inequalities.

All products of squared errors are evaluated in log space.  A report
passes when ``lhs <= rhs * (1 + tol_report)``, i.e. when
``slack_log = rhs_log - lhs_log >= -log1p(tol_report)``.  A left-hand side
of exactly zero (``lhs_log = -inf``) always passes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TOL_REPORT",
    "LemmaInstance",
    "BoundReport",
    "RateParams",
    "lemma1_check",
    "random_lemma_instance",
    "theorem_hilbert_check",
    "theorem_banach_check",
    "theorem_sweep",
    "c11_rhs",
    "c21_rhs",
    "corollary_checks",
    "certify_hypothesis",
    "reference_rates",
    "COROLLARIES",
]

TOL_REPORT = 1e-10
COROLLARIES = ("C1_i", "C1_ii", "C1_iii", "C2_i", "C2_ii", "C2_iii")


def _log(x: float) -> float:
    return -math.inf if x == 0.0 else math.log(x)


@dataclass
class BoundReport:
    """One evaluated inequality ``lhs <= rhs``.

    ``status`` is ``pass``, ``fail`` or ``hypothesis-unmet``; the last one
    means the supplied width data did not satisfy the assumed rate, so the
    check says nothing about the inequality itself.
    """

    name: str
    lhs_log: float
    rhs_log: float
    N: int | None = None
    K: int | None = None
    m: int | None = None
    gamma: float = 1.0
    tol_report: float = TOL_REPORT
    notes: str = ""
    hypothesis_met: bool = True
    exploratory: bool = False
    inputs: dict = field(default_factory=dict)

    @property
    def slack_log(self) -> float:
        if self.lhs_log == -math.inf:
            return math.inf
        return self.rhs_log - self.lhs_log

    @property
    def passed(self) -> bool:
        return self.slack_log >= -math.log1p(self.tol_report)

    @property
    def status(self) -> str:
        if not self.hypothesis_met:
            return "hypothesis-unmet"
        return "pass" if self.passed else "fail"

    @property
    def lhs(self) -> float:
        return math.exp(self.lhs_log)

    @property
    def rhs(self) -> float:
        return math.exp(self.rhs_log)

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def near_equality(self, tol: float = TOL_REPORT) -> bool:
        """``|rhs - lhs| <= tol * rhs``."""
        if self.lhs_log == -math.inf or self.rhs_log == -math.inf:
            return self.lhs_log == self.rhs_log
        return abs(math.expm1(-self.slack_log)) <= tol

    def row(self) -> dict:
        return {
            "name": self.name,
            "N": "" if self.N is None else self.N,
            "K": "" if self.K is None else self.K,
            "m": "" if self.m is None else self.m,
            "gamma": self.gamma,
            "lhs_log": self.lhs_log,
            "rhs_log": self.rhs_log,
            "slack_log": self.slack_log,
            "pass": self.status,
            "notes": self.notes,
        }


# ---------------------------------------------------------------------------
# the matrix inequality


@dataclass(frozen=True)
class LemmaInstance:
    G: np.ndarray  # (K, K) lower triangular
    W_basis: np.ndarray  # (m, K) orthonormal rows

    def __post_init__(self):
        G = np.asarray(self.G, dtype=float)
        W = np.asarray(self.W_basis, dtype=float)
        if G.ndim != 2 or G.shape[0] != G.shape[1]:
            raise ValueError("G must be square")
        if np.any(np.triu(G, 1) != 0):
            raise ValueError("G must be lower triangular")
        W = W.reshape(-1, G.shape[0])
        K, m = G.shape[0], W.shape[0]
        if not 1 <= m < K:
            raise ValueError(f"need 1 <= m < K, got m={m}, K={K}")
        if not np.allclose(W @ W.T, np.eye(m), rtol=0.0, atol=1e-12):
            raise ValueError("W_basis is not orthonormal")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "W_basis", W)

    @property
    def K(self) -> int:
        return self.G.shape[0]

    @property
    def m(self) -> int:
        return self.W_basis.shape[0]


def lemma1_check(inst: LemmaInstance, tol_report: float = TOL_REPORT) -> BoundReport:
    """``prod g_ii^2 <= (sum |P g_i|^2 / m)^m (sum |g_i - P g_i|^2 / (K-m))^(K-m)``."""
    G, W, K, m = inst.G, inst.W_basis, inst.K, inst.m
    PG = (G @ W.T) @ W
    inside = float(np.sum(PG ** 2))
    outside = float(np.sum((G - PG) ** 2))
    lhs_log = float(np.sum([2.0 * _log(abs(g)) for g in np.diag(G)]))
    rhs_log = m * _log(inside / m) + (K - m) * _log(outside / (K - m))
    return BoundReport("lemma", lhs_log, rhs_log, K=K, m=m, tol_report=tol_report,
                       inputs={"inside": inside, "outside": outside})


def random_lemma_instance(rng, K_max: int = 8) -> LemmaInstance:
    """Random ``(G, W)`` with ``2 <= K <= K_max`` and a random ``m``."""
    K = int(rng.integers(2, K_max + 1))
    m = int(rng.integers(1, K))
    G = np.tril(rng.standard_normal((K, K)) * rng.exponential(1.0, size=(K, 1)))
    Q, _ = np.linalg.qr(rng.standard_normal((K, m)))
    return LemmaInstance(G, Q.T)


# ---------------------------------------------------------------------------
# sigma / width products


def _d_at(d_upper, m: int) -> float:
    if hasattr(d_upper, "upper"):
        return float(d_upper.upper(m))
    return float(d_upper[m])


def _theorem_inputs(sigmas, d_upper, N, K, m):
    if not 1 <= m < K:
        raise ValueError(f"need 1 <= m < K, got m={m}, K={K}")
    if N < 0:
        raise ValueError("N must be non-negative")
    s = np.asarray(sigmas, dtype=float)
    if s.shape[0] < N + K + 1:
        raise IndexError(f"sigmas must reach index N+K={N + K}")
    block = s[N + 1:N + K + 1]
    return block, _d_at(d_upper, m)


def theorem_hilbert_check(sigmas, d_upper, N: int, K: int, m: int, gamma: float = 1.0,
                          tol_report: float = TOL_REPORT, solver_tol: float = 0.0) -> BoundReport:
    """``prod sigma_{N+i}^2 <= g^-2K (K/m)^m (K/(K-m))^(K-m) sigma_{N+1}^2m d_m^(2K-2m)``.

    Valid with ``d_m`` replaced by any upper bound since the right-hand
    side increases with ``d_m``.
    """
    block, d = _theorem_inputs(sigmas, d_upper, N, K, m)
    lhs_log = float(sum(2.0 * _log(v) for v in block))
    rhs_log = (-2 * K * math.log(gamma) + m * math.log(K / m) + (K - m) * math.log(K / (K - m))
               + 2 * m * _log(block[0]) + (2 * K - 2 * m) * _log(d))
    return BoundReport("theorem_hilbert", lhs_log, rhs_log, N=N, K=K, m=m, gamma=gamma,
                       tol_report=tol_report, notes="d_m is an upper bound; rhs increasing in d_m",
                       inputs={"d_m": d, "solver_tol": solver_tol})


def theorem_banach_check(sigmas, d_upper, N: int, K: int, m: int, gamma: float = 1.0,
                         tol_report: float = TOL_REPORT, solver_tol: float = 0.0) -> BoundReport:
    """``prod sigma_{N+i}^2 <= 2^K K^(K-m) g^-2K (sum sigma_{N+i}^2)^m d_m^(2K-2m)``."""
    block, d = _theorem_inputs(sigmas, d_upper, N, K, m)
    lhs_log = float(sum(2.0 * _log(v) for v in block))
    rhs_log = (K * math.log(2.0) + (K - m) * math.log(K) - 2 * K * math.log(gamma)
               + m * _log(float(np.sum(block ** 2))) + (2 * K - 2 * m) * _log(d))
    return BoundReport("theorem_banach", lhs_log, rhs_log, N=N, K=K, m=m, gamma=gamma,
                       tol_report=tol_report, notes="d_m is an upper bound; rhs increasing in d_m",
                       inputs={"d_m": d, "solver_tol": solver_tol})


def theorem_sweep(sigmas, d_upper, gamma: float, mode: str = "hilbert", K_max: int = 6,
                  N_max: int | None = None, tol_report: float = TOL_REPORT,
                  solver_tol: float = 0.0) -> list:
    """Every admissible ``(N, K, m)`` with ``2 <= K <= K_max`` covered by the data.

    Reports come back in lexicographic ``(N, K, m)`` order.
    """
    check = theorem_hilbert_check if mode == "hilbert" else theorem_banach_check
    last = len(sigmas) - 1
    if N_max is None:
        N_max = last
    out = []
    for N in range(0, N_max + 1):
        for K in range(2, K_max + 1):
            if N + K > last:
                break
            for m in range(1, K):
                if hasattr(d_upper, "has_upper") and not d_upper.has_upper(m):
                    continue
                if not hasattr(d_upper, "has_upper") and m >= len(d_upper):
                    continue
                out.append(check(sigmas, d_upper, N, K, m, gamma, tol_report, solver_tol))
    return out


# ---------------------------------------------------------------------------
# rates


@dataclass(frozen=True)
class RateParams:
    """Rate hypothesis ``d_n <= C0 n^-alpha`` (``kind='poly'``) or ``C0 exp(-c0 n^alpha)``.

    The derived constants follow the corollary formulas; ``c1_scale``
    multiplies every derived ``C1`` and exists only to build deliberately
    wrong checks.
    """

    alpha: float
    C0: float = 1.0
    c0: float = 1.0
    gamma: float = 1.0
    beta: float | None = None
    kind: str = "poly"
    c1_scale: float = 1.0
    c1_prime: float | None = None

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")
        if self.kind not in ("poly", "exp"):
            raise ValueError("kind is 'poly' or 'exp'")
        if self.beta is not None and not 0 < self.beta < min(self.alpha, 0.5):
            raise ValueError("beta must satisfy 0 < beta < min(alpha, 1/2)")

    @property
    def C1_hilbert(self) -> float:
        return self.c1_scale * 2.0 ** (5 * self.alpha + 1) * self.gamma ** -2 * self.C0

    @property
    def c1(self) -> float:
        return 2.0 ** (-1 - 2 * self.alpha) * self.c0

    @property
    def beta_or_default(self) -> float:
        return self.beta if self.beta is not None else 0.5 * min(self.alpha, 0.5)

    @property
    def C1_banach(self) -> float:
        a, b = self.alpha, self.beta_or_default
        first = self.C0 * 4.0 ** (4 * a + 1) * self.gamma ** -4 * ((2 * b + 1) / (2 * b)) ** a
        second = max(n ** (a - b - 0.5) for n in range(1, 8))
        return self.c1_scale * max(first, second)

    def envelope(self, n: int) -> float:
        if self.kind == "poly":
            return self.C0 * n ** -self.alpha
        return self.C0 * math.exp(-self.c0 * n ** self.alpha)


def certify_hypothesis(d_upper, rate: RateParams, n_range, tol: float = 1e-12):
    """First ``n`` in ``n_range`` where the certified ``d_n`` exceeds the envelope, else ``None``.

    Only the supplied finite range is checked.
    """
    for n in n_range:
        if _d_at(d_upper, n) > rate.envelope(n) * (1 + tol):
            return n
    return None


def c11_rhs(d_upper, n: int, m: int, gamma: float) -> float:
    """``sqrt(2) g^-1 d_m^((n-m)/n)``, one term of the Hilbert min form."""
    return math.sqrt(2.0) / gamma * _d_at(d_upper, m) ** ((n - m) / n)


def c21_rhs(sigmas, d_upper, n: int, m: int, gamma: float) -> float:
    """``sqrt(2) g^-1 n^((n-m)/2n) (sum_{i<=n} sigma_i^2)^(m/2n) d_m^((n-m)/n)``."""
    s = np.asarray(sigmas, dtype=float)
    energy = float(np.sum(s[1:n + 1] ** 2))
    return (math.sqrt(2.0) / gamma * n ** ((n - m) / (2 * n)) * energy ** (m / (2 * n))
            * _d_at(d_upper, m) ** ((n - m) / n))


def _compare(name, lhs, rhs, n, m=None, gamma=1.0, notes="", **kw) -> BoundReport:
    return BoundReport(name, _log(lhs), _log(rhs), N=n, m=m, gamma=gamma, notes=notes, **kw)


def _best_m(terms):
    m, v = min(terms, key=lambda mv: mv[1])
    return m, v


def corollary_checks(sigmas, d_upper, rate: RateParams | None, which=COROLLARIES,
                     n_max: int | None = None, gamma: float | None = None) -> list:
    """Evaluate the corollary inequalities at every covered ``n``.

    ``sigmas`` holds ``sigma_0..sigma_L``; ``d_upper`` gives certified
    upper bounds on the widths.  Rate checks (``*_ii``, ``*_iii``) need
    ``rate``; if the widths break its envelope on ``1..n`` the reports are
    marked ``hypothesis-unmet``.
    """
    s = np.asarray(sigmas, dtype=float)
    L = len(s) - 1 if n_max is None else min(n_max, len(s) - 1)
    if gamma is None:
        gamma = rate.gamma if rate is not None else 1.0
    has_d = (lambda k: d_upper.has_upper(k)) if hasattr(d_upper, "has_upper") else (lambda k: k < len(d_upper))
    out = []
    unit = s[0] <= 1.0 + 1e-12
    ball_note = "" if unit else "sigma_0 > 1: set not in the unit ball"

    def certified(n_hi):
        if rate is None:
            raise ValueError("rate checks need RateParams")
        rng = [k for k in range(1, n_hi + 1) if has_d(k)]
        bad = certify_hypothesis(d_upper, rate, rng)
        return bad is None, ("" if bad is None else f"envelope broken at n={bad}; checked n<={n_hi} only")

    for name in which:
        if name == "C1_i":
            for n in range(1, L // 2 + 1):
                if has_d(n):
                    out.append(_compare("C1_i", s[2 * n], c11_rhs(d_upper, 2 * n, n, gamma), 2 * n, n, gamma,
                                        "sigma_2n <= sqrt2/g sqrt(d_n)"))
            for n in range(2, L + 1):
                terms = [(m, c11_rhs(d_upper, n, m, gamma)) for m in range(1, n) if has_d(m)]
                if terms:
                    m, v = _best_m(terms)
                    out.append(_compare("C11", s[n], v, n, m, gamma, "min form"))
        elif name == "C2_i":
            for l in range(1, L // 2 + 1):
                if has_d(l):
                    rhs = 2.0 / gamma * math.sqrt(l * _d_at(d_upper, l))
                    out.append(_compare("C2_i", s[2 * l], rhs, 2 * l, l, gamma,
                                        "sigma_2l <= 2/g sqrt(l d_l)" + ("; " + ball_note if ball_note else ""),
                                        hypothesis_met=unit))
            for n in range(2, L + 1):
                terms = [(m, c21_rhs(s, d_upper, n, m, gamma)) for m in range(1, n) if has_d(m)]
                if terms:
                    m, v = _best_m(terms)
                    out.append(_compare("C21", s[n], v, n, m, gamma, "min form"))
        elif name in ("C1_ii", "C2_ii"):
            if rate is None or rate.kind != "poly":
                continue
            ok, why = certified(L)
            for n in range(1, L + 1):
                if name == "C1_ii":
                    rhs = rate.C1_hilbert * n ** -rate.alpha
                    note = f"C1={rate.C1_hilbert!r}"
                else:
                    b = rate.beta_or_default
                    rhs = rate.C1_banach * n ** (-rate.alpha + 0.5 + b)
                    note = f"C1={rate.C1_banach!r}, beta={b!r}"
                out.append(_compare(name, s[n], rhs, n, None, gamma, "; ".join(filter(None, [note, why])),
                                    hypothesis_met=ok and unit))
        elif name in ("C1_iii", "C2_iii"):
            if rate is None or rate.kind != "exp":
                continue
            ok, why = certified(L)
            a = rate.alpha
            for n in range(1, L + 1):
                base = math.sqrt(2 * rate.C0) / gamma
                if name == "C1_iii":
                    rhs = base * math.exp(-rate.c1 * n ** a)
                else:
                    rhs = base * math.sqrt(n) * math.exp(-rate.c1 * n ** a)
                out.append(_compare(name, s[n], rhs, n, None, gamma, "; ".join(filter(None, [f"c1={rate.c1!r}", why])),
                                    hypothesis_met=ok and unit))
                if name == "C1_iii" and n >= 2:
                    # minimum of the Hilbert min form under the exponential envelope
                    expo = max((m / n) ** a * (1 - m / n) for m in range(1, n))
                    tight = math.sqrt(2.0) / gamma * max(1.0, rate.C0) * math.exp(-rate.c0 * n ** a * expo)
                    out.append(_compare("C1_iii_tight", s[n], tight, n, None, gamma,
                                        "computed minimum over m", hypothesis_met=ok and unit))
                if name == "C2_iii" and rate.c1_prime is not None:
                    rhs2 = base * math.exp(-rate.c1_prime * n ** a)
                    out.append(_compare("C2_iii_nosqrt", s[n], rhs2, n, None, gamma,
                                        f"user c1'={rate.c1_prime!r}", hypothesis_met=ok and unit,
                                        exploratory=True))
        else:
            raise ValueError(f"unknown corollary {name!r}")
    return out


def reference_rates(rate: RateParams, n: int, d_n: float | None = None, C: float = 1.0,
                    C_prime: float = 1.0, c_prime: float = 1.0) -> dict:
    """Earlier comparison curves at ``n`` (no pass/fail meaning).

    ``BMPPT``: ``C n 2^n d_n``; ``poly1``: ``C' n^-alpha``;
    ``poly2``: ``C' exp(-c' n^beta)`` with ``beta = alpha/(alpha+1)``.
    """
    beta = rate.alpha / (rate.alpha + 1)
    out = {
        "poly1": C_prime * n ** -rate.alpha,
        "poly2": C_prime * math.exp(-c_prime * n ** beta),
        "poly2_beta": beta,
    }
    if d_n is not None:
        out["BMPPT"] = C * n * 2.0 ** n * d_n
    return out
