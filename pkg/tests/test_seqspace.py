import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from weakgreedy.seqspace import (TAU_DUAL, NormKind, as_vector, basis_vector, dual_norm, inner,
                                 norm, norming_functional)

KINDS = [NormKind.hilbert(), NormKind.l1(), NormKind.linf(), NormKind.lp(3), NormKind.lp(1.5)]
finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
vectors = st.integers(1, 8).flatmap(lambda n: arrays(float, n, elements=finite))


def test_norm_examples():
    assert norm([1, 0, 0], NormKind.linf()) == 1.0
    assert norm([3, 4], NormKind.hilbert()) == 5.0
    assert norm([1, 1], NormKind.lp(3)) == pytest.approx(2 ** (1 / 3), rel=1e-15)


def test_inner_examples():
    e0, e1 = basis_vector(0, 3), basis_vector(1, 3)
    assert inner(e0, e1) == 0.0
    assert inner(e0, e0) == 1.0
    assert inner([1, 2], [3, 4]) == 11.0
    with pytest.raises(ValueError):
        inner([1, 2], [1, 2, 3])


def test_norm_kind_validation():
    with pytest.raises(ValueError):
        NormKind.lp(1.0)
    with pytest.raises(ValueError):
        NormKind.lp(np.inf)
    assert NormKind.parse("l3") == NormKind.lp(3)
    assert NormKind.parse("linf").dual() == NormKind.l1()
    assert NormKind.lp(3).dual().p == pytest.approx(1.5)


def test_vectors_must_be_finite():
    with pytest.raises(ValueError):
        as_vector([1.0, np.nan])
    with pytest.raises(ValueError):
        as_vector([1.0, 2.0], dim=3)


def test_norming_functional_examples():
    lam = norming_functional([0, 2], NormKind.hilbert())
    np.testing.assert_array_equal(lam.coeffs, [0, 1])
    lam = norming_functional([0.5, -2, 1], NormKind.linf())
    np.testing.assert_array_equal(lam.coeffs, [0, -1, 0])
    lam = norming_functional([1, 1], NormKind.lp(3))
    np.testing.assert_allclose(lam.coeffs, [2 ** (-2 / 3)] * 2, rtol=1e-15)
    assert lam([1, 1]) == pytest.approx(2 ** (1 / 3), rel=1e-14)
    assert lam.norm == pytest.approx(1.0, rel=1e-14)


def test_linf_tie_goes_to_smallest_index():
    lam = norming_functional([1, -2, 2], NormKind.linf())
    np.testing.assert_array_equal(lam.coeffs, [0, -1, 0])


def test_l1_functional_sign_zero():
    lam = norming_functional([0, -3, 2], NormKind.l1())
    np.testing.assert_array_equal(lam.coeffs, [0, -1, 1])


def test_norming_functional_zero_vector():
    for k in KINDS:
        with pytest.raises(ValueError):
            norming_functional([0.0, 0.0], k)


@pytest.mark.parametrize("kind", KINDS, ids=str)
def test_norming_functional_random(kind):
    rng = np.random.default_rng(1)
    for _ in range(1000):
        r = rng.standard_normal(rng.integers(1, 9)) * rng.exponential(3.0)
        lam = norming_functional(r, kind)
        nr = norm(r, kind)
        assert abs(lam(r) - nr) <= TAU_DUAL * nr
        assert abs(lam.norm - 1.0) <= TAU_DUAL
        v = rng.standard_normal(r.size)
        assert abs(lam(v)) <= norm(v, kind) * (1 + 1e-12)


@settings(max_examples=200, deadline=None)
@given(vectors, st.floats(-50, 50, allow_nan=False), st.sampled_from(KINDS))
def test_norm_homogeneous_and_definite(v, a, kind):
    n = norm(v, kind)
    assert (n == 0) == (not np.any(v))
    assert norm(a * v, kind) == pytest.approx(abs(a) * n, rel=1e-12, abs=1e-300)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(*[arrays(float, n, elements=finite)] * 3)),
       st.sampled_from(KINDS))
def test_triangle_inequality(uvw, kind):
    u, v, w = uvw
    assert norm(u - w, kind) <= (norm(u - v, kind) + norm(v - w, kind)) * (1 + 1e-12) + 1e-300


def test_dual_norm_pairs():
    v = np.array([3.0, -4.0])
    assert dual_norm(v, NormKind.linf()) == 7.0
    assert dual_norm(v, NormKind.l1()) == 4.0
    assert dual_norm(v, NormKind.hilbert()) == 5.0


def test_lp_norm_no_overflow():
    v = np.array([1e200, 1e200])
    assert norm(v, NormKind.lp(3)) == pytest.approx(1e200 * 2 ** (1 / 3), rel=1e-14)
