import numpy as np
import pytest

from weakgreedy.seqspace import NormKind
from weakgreedy.sets import (CompactSet, Diagonal, DyadicBlocks, FromMatrix, ParametricSurrogate,
                             RandomBall, check_p1_p2, dyadic_values, known_widths, random_p1p2_matrix,
                             realize, tight_sigmas)

H = NormKind.hilbert()
KINDS = [H, NormKind.l1(), NormKind.linf(), NormKind.lp(3)]


def test_diagonal_realization():
    F = realize(Diagonal((1, 0.5, 0.25)), H)
    np.testing.assert_array_equal(F.elements, np.diag([1, 0.5, 0.25]))
    G = F.elements @ F.elements.T
    assert np.count_nonzero(G - np.diag(np.diag(G))) == 0


def test_dyadic_values_levels_three():
    np.testing.assert_array_equal(dyadic_values(1.0, 3), [1, .5, .25, .25, .125, .125, .125, .125])
    F = realize(DyadicBlocks(1.0, 3), NormKind.linf())
    np.testing.assert_array_equal(np.diag(F.elements), dyadic_values(1.0, 3))


def test_dyadic_needs_alpha_above_half():
    with pytest.raises(ValueError):
        DyadicBlocks(0.4, 3)


def test_frommatrix_needs_sigmas_decreasing_to_zero():
    with pytest.raises(ValueError, match="decrease to 0"):
        realize(FromMatrix(np.eye(3), (1, 1, 1)), H)


def test_frommatrix_rejects_p1_violation():
    A = np.array([[1.0, 0.0], [0.0, 0.2]])
    with pytest.raises(ValueError, match="P1"):
        realize(FromMatrix(A, (1.0, 0.5, 0.0), gamma=1.0), H)


def test_diagonal_validation():
    with pytest.raises(ValueError):
        Diagonal((1.0, 0.0))
    with pytest.raises(ValueError):
        Diagonal((0.5, 1.0))


def test_unit_ball_enforced():
    with pytest.raises(ValueError):
        CompactSet(np.array([[1.0, 1.0]]), H)
    CompactSet(np.array([[1.0, 0.0]]), NormKind.linf())


@pytest.mark.parametrize("kind", KINDS, ids=str)
def test_random_ball_inside_ball_and_deterministic(kind):
    a = realize(RandomBall(5, 40, 3), kind)
    b = realize(RandomBall(5, 40, 3), kind)
    np.testing.assert_array_equal(a.elements, b.elements)
    assert a.norms().max() <= 1.0
    c = realize(RandomBall(5, 40, 4), kind)
    assert not np.array_equal(a.elements, c.elements)


def test_random_ball_is_uniform_in_radius():
    # for the uniform ball in R^d, P(|x| <= r) = r^d
    F = realize(RandomBall(3, 4000, 1), H)
    r = F.norms()
    assert np.mean(r <= 0.5) == pytest.approx(0.125, abs=0.02)


@pytest.mark.parametrize("kind", KINDS, ids=str)
def test_parametric_surrogate(kind):
    F = realize(ParametricSurrogate(6, 25), kind)
    assert F.norms().max() == pytest.approx(1.0, rel=1e-12)
    np.testing.assert_allclose(F.elements[:, 0] * F.elements[0, 0] > 0, True)


def test_known_widths_examples():
    ws = known_widths(Diagonal((1, 0.5, 0.25)), 4)
    assert ws.upper(0) == 1.0 and ("exact" in [t for n, v, t, p in ws.values if n == 0])
    assert ws.upper(1) == 0.5
    assert ws.upper(3) == 0.0
    ws = known_widths(DyadicBlocks(1.0, 5), 16)
    for k in range(5):
        assert ws.upper(2 ** k) == 2.0 ** (-(k + 1))
    assert known_widths(RandomBall(3, 4, 0), 3) is None


def test_random_p1p2_matrices_are_valid():
    rng = np.random.default_rng(0)
    for g in (1.0, 0.7, 0.5):
        for K in range(1, 10):
            A, s = random_p1p2_matrix(K, g, rng)
            assert check_p1_p2(A, s, g) == []
            np.testing.assert_array_equal(s, tight_sigmas(A))
            realize(FromMatrix(A, s, g), H)


def test_check_p1_p2_reports_p2():
    A = np.array([[1.0, 0.0], [0.9, 0.5]])
    s = np.array([1.0, 0.5, 0.0])
    assert any("P2" in p for p in check_p1_p2(A, s, 1.0))
