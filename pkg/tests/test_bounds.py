import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weakgreedy.bounds import (BoundReport, LemmaInstance, RateParams, c11_rhs, certify_hypothesis,
                               corollary_checks, lemma1_check, random_lemma_instance, reference_rates,
                               theorem_banach_check, theorem_hilbert_check, theorem_sweep)
from weakgreedy.greedy import WeakGreedyParams, run_weak_greedy
from weakgreedy.seqspace import NormKind
from weakgreedy.sets import Diagonal, RandomBall, realize
from weakgreedy.widths import assemble_widths


def _lemma_linear(G, W):
    """Plain linear-space evaluation with an explicit projector matrix."""
    K, m = G.shape[0], W.shape[0]
    P = sum(np.outer(w, w) for w in W)
    a = sum(np.linalg.norm(P @ g) ** 2 for g in G)
    b = sum(np.linalg.norm(g - P @ g) ** 2 for g in G)
    return np.prod(np.diag(G) ** 2), (a / m) ** m * (b / (K - m)) ** (K - m)


# -- lemma -----------------------------------------------------------------------

@pytest.mark.parametrize("K,m", [(2, 1), (5, 2), (8, 7)])
def test_lemma_identity_is_equality(K, m):
    r = lemma1_check(LemmaInstance(np.eye(K), np.eye(K)[:m]))
    assert r.lhs == pytest.approx(1.0, abs=1e-15) and r.rhs == pytest.approx(1.0, abs=1e-15)
    assert r.passed and r.near_equality(1e-10)


def test_lemma_zero_diagonal():
    G = np.tril(np.ones((4, 4)))
    G[2, 2] = 0.0
    r = lemma1_check(LemmaInstance(G, np.eye(4)[:1]))
    assert r.lhs_log == -math.inf and r.lhs == 0.0 and r.passed


def test_lemma_instance_validation():
    with pytest.raises(ValueError):
        LemmaInstance(np.eye(3), np.array([[1.0, 1.0, 0.0]]))
    with pytest.raises(ValueError):
        LemmaInstance(np.ones((3, 3)), np.eye(3)[:1])
    with pytest.raises(ValueError):
        LemmaInstance(np.eye(3), np.eye(3))


def test_lemma_fuzz_thousand_draws():
    rng = np.random.default_rng(2024)
    worst = math.inf
    for _ in range(1000):
        inst = random_lemma_instance(rng, 8)
        assert inst.K <= 8
        r = lemma1_check(inst)
        assert r.passed
        worst = min(worst, r.slack_log)
    assert worst >= -math.log1p(1e-10)


@pytest.mark.parametrize("seed", range(20))
def test_lemma_matches_linear_evaluation(seed):
    rng = np.random.default_rng(seed)
    inst = random_lemma_instance(rng, 6)
    lhs, rhs = _lemma_linear(inst.G, inst.W_basis)
    r = lemma1_check(inst)
    assert r.lhs == pytest.approx(lhs, rel=1e-10)
    assert r.rhs == pytest.approx(rhs, rel=1e-10)


# -- theorems --------------------------------------------------------------------

def test_theorem_hilbert_example():
    x = 0.5 ** np.arange(6)
    s = np.r_[x, 0.0]
    r = theorem_hilbert_check(s, x, 0, 2, 1)
    assert r.lhs == pytest.approx(1 / 64, rel=1e-14)
    assert r.rhs == pytest.approx(1 / 4, rel=1e-14)
    assert r.passed and r.status == "pass"


def test_theorem_banach_has_more_slack_on_the_example():
    x = 0.5 ** np.arange(6)
    h = theorem_hilbert_check(x, x, 0, 2, 1)
    b = theorem_banach_check(x, x, 0, 2, 1)
    # 2^2 * 2 * (1/4 + 1/16) * (1/4) = 5/8
    assert b.rhs == pytest.approx(5 / 8, rel=1e-14)
    assert b.slack_log > h.slack_log


def test_theorem_preconditions():
    x = 0.5 ** np.arange(6)
    for chk in (theorem_hilbert_check, theorem_banach_check):
        with pytest.raises(ValueError):
            chk(x, x, 0, 1, 1)
        with pytest.raises(ValueError):
            chk(x, x, 0, 3, 0)
        with pytest.raises(IndexError):
            chk(x, x, 3, 4, 1)


def test_theorem_zero_sigma_passes():
    s = [1.0, 0.0, 0.0, 0.0]
    for chk in (theorem_hilbert_check, theorem_banach_check):
        r = chk(s, [1.0, 0.0], 0, 2, 1)
        assert r.lhs_log == -math.inf and r.passed


def test_theorem_banach_degenerate_prefactor():
    # all sigma equal to d: the check reduces to 2^K K^(K-m) K^m >= 1
    d = 0.3
    s = np.full(8, d)
    for K in range(2, 7):
        for m in range(1, K):
            r = theorem_banach_check(s, s, 0, K, m)
            assert r.rhs_log - r.lhs_log == pytest.approx(K * math.log(2) + K * math.log(K), rel=1e-12)


def test_theorem_log_space_long_block():
    s = np.r_[1.0, np.full(60, 1e-10)]
    d = np.full(61, 1e-10)
    r = theorem_hilbert_check(s, d, 0, 50, 10)
    assert np.isfinite(r.lhs_log) and r.lhs_log == pytest.approx(100 * math.log(1e-10))
    assert r.lhs == 0.0  # underflows in linear space, the log does not
    assert r.passed


def test_theorem_hilbert_linear_oracle():
    rng = np.random.default_rng(3)
    s = np.sort(rng.uniform(0.1, 1, 9))[::-1]
    d = np.sort(rng.uniform(0.05, 1, 9))[::-1]
    for K in range(2, 6):
        for m in range(1, K):
            blk = s[1:K + 1]
            lhs = np.prod(blk ** 2)
            rhs = (K / m) ** m * (K / (K - m)) ** (K - m) * s[1] ** (2 * m) * d[m] ** (2 * K - 2 * m)
            r = theorem_hilbert_check(s, d, 0, K, m, gamma=0.8)
            assert r.lhs == pytest.approx(lhs, rel=1e-12)
            assert r.rhs == pytest.approx(rhs * 0.8 ** (-2 * K), rel=1e-12)


@pytest.mark.parametrize("kind", [NormKind.hilbert(), NormKind.linf(), NormKind.l1()], ids=str)
def test_theorem_sweep_on_traces(kind):
    for seed in range(2):
        F = realize(RandomBall(4, 10, seed), kind)
        tr = run_weak_greedy(F, WeakGreedyParams(gamma=0.7, policy="minimal_above_threshold"))
        ws = assemble_widths(F, 4, ["svd", "greedy"], trace=tr)
        mode = "hilbert" if kind.name == "hilbert" else "banach"
        reps = theorem_sweep(tr.sigmas, ws, 0.7, mode)
        assert reps and all(r.passed for r in reps)
        keys = [(r.N, r.K, r.m) for r in reps]
        assert keys == sorted(keys)


def test_report_row_and_tolerance():
    r = BoundReport("x", math.log(1 + 5e-11), 0.0, tol_report=1e-10)
    assert r.passed
    r = BoundReport("x", math.log(1 + 5e-10), 0.0, tol_report=1e-10)
    assert not r.passed and r.status == "fail"
    row = r.row()
    for col in ("name", "N", "K", "m", "gamma", "lhs_log", "rhs_log", "slack_log", "pass", "notes"):
        assert col in row


# -- corollaries -----------------------------------------------------------------

def _diag_trace(x, gamma=1.0):
    F = realize(Diagonal(tuple(x)), NormKind.hilbert())
    return run_weak_greedy(F, WeakGreedyParams(gamma=gamma)).sigmas


def test_c1_i_harmonic_diagonal():
    x = 1.0 / (np.arange(130) + 1)
    s = _diag_trace(x)
    reps = corollary_checks(s, x, RateParams(alpha=1.0), ["C1_i", "C1_ii"], n_max=128)
    c1 = [r for r in reps if r.name == "C1_i"]
    assert len(c1) == 64 and all(r.passed for r in c1)
    assert all(r.passed for r in reps)
    assert all(r.status != "hypothesis-unmet" for r in reps)


def test_c11_at_n_equals_2m_matches_standalone():
    x = 1.0 / (np.arange(40) + 1)
    for gamma in (1.0, 0.5):
        for n in range(1, 20):
            standalone = math.sqrt(2) / gamma * math.sqrt(x[n])
            assert c11_rhs(x, 2 * n, n, gamma) == standalone


def test_hypothesis_unmet():
    d = np.ones(10)
    rate = RateParams(alpha=1.0, C0=1.0)
    assert certify_hypothesis(d, rate, range(1, 10)) == 2
    reps = corollary_checks(np.r_[1.0, np.full(9, 1.0)], d, rate, ["C1_ii"])
    assert reps and all(r.status == "hypothesis-unmet" for r in reps)


def test_gamma_powers():
    x = 2.0 ** -np.arange(20)
    s = x.copy()
    pairs = [("C1_i", 2.0), ("C11", 2.0), ("C2_i", 2.0), ("C1_ii", 4.0), ("C2_ii", 16.0)]
    kw = dict(which=["C1_i", "C2_i", "C1_ii", "C2_ii"], n_max=16)
    one = corollary_checks(s, x, RateParams(alpha=2.0, gamma=1.0), **kw)
    half = corollary_checks(s, x, RateParams(alpha=2.0, gamma=0.5), **kw)
    for name, factor in pairs:
        for a, b in zip([r for r in one if r.name == name], [r for r in half if r.name == name]):
            assert b.rhs / a.rhs == pytest.approx(factor, rel=1e-12)
    e1 = corollary_checks(s, x, RateParams(alpha=1.0, kind="exp", c0=0.5, gamma=1.0), ["C1_iii", "C2_iii"])
    e2 = corollary_checks(s, x, RateParams(alpha=1.0, kind="exp", c0=0.5, gamma=0.5), ["C1_iii", "C2_iii"])
    for a, b in zip(e1, e2):
        assert b.rhs / a.rhs == pytest.approx(2.0, rel=1e-12)
    # Theorem checks carry gamma^-2K
    for chk in (theorem_hilbert_check, theorem_banach_check):
        r1, r2 = chk(s, x, 1, 4, 2, 1.0), chk(s, x, 1, 4, 2, 0.5)
        assert r2.rhs_log - r1.rhs_log == pytest.approx(8 * math.log(2), rel=1e-12)


def test_rate_constants():
    r = RateParams(alpha=1.0, C0=2.0, c0=0.8, gamma=0.5)
    assert r.C1_hilbert == 2 ** 6 * 4 * 2.0
    assert r.c1 == pytest.approx(0.8 / 8)
    assert r.beta_or_default == 0.25
    with pytest.raises(ValueError):
        RateParams(alpha=1.0, beta=0.6)


@pytest.mark.parametrize("alpha,kind,c0", [(1.0, "poly", 1.0), (2.0, "poly", 1.0), (0.5, "exp", 1.0),
                                           (1.0, "exp", 0.5)])
def test_corollaries_with_exact_constants(alpha, kind, c0):
    j = np.arange(40)
    x = (j + 1.0) ** -alpha if kind == "poly" else np.exp(-c0 * j ** alpha)
    rate = RateParams(alpha=alpha, C0=1.0, c0=c0, kind=kind)
    for gamma in (1.0, 0.5):
        s = _diag_trace(x, gamma)
        reps = corollary_checks(s, x, RateParams(**{**rate.__dict__, "gamma": gamma}), n_max=32)
        assert reps
        assert [r for r in reps if not r.passed] == []


def test_reference_rates():
    r = reference_rates(RateParams(alpha=1.0), 1, d_n=0.3)
    assert r["poly2_beta"] == 0.5
    assert r["BMPPT"] == pytest.approx(2 * 0.3)
    assert set(r) == {"poly1", "poly2", "poly2_beta", "BMPPT"}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([0.3, 0.6, 1.0]))
def test_theorems_hold_on_random_hilbert_traces(seed, gamma):
    F = realize(RandomBall(3, 7, seed), NormKind.hilbert())
    tr = run_weak_greedy(F, WeakGreedyParams(gamma=gamma, policy="minimal_above_threshold"))
    ws = assemble_widths(F, 3, ["svd"])
    for mode in ("hilbert", "banach"):
        assert all(r.passed for r in theorem_sweep(tr.sigmas, ws, gamma, mode))
