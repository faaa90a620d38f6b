from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gorenlab.exactlinalg import Field, kernel_basis, rref, solve
from helpers import gauss_rank

F5 = Field(5)
QQ = Field.rational()


def test_rref_identity():
    R, piv, T = rref(F5.eye(3), F5)
    assert np.array_equal(R, F5.eye(3))
    assert piv == [0, 1, 2]


def test_rref_zero():
    R, piv, _ = rref(F5.zeros((2, 3)), F5)
    assert F5.is_zero(R) and piv == []


def test_rref_rank_one_mod5():
    A = F5.array([[1, 2], [2, 4]])
    R, piv, T = rref(A, F5)
    assert piv == [0]
    assert np.array_equal(F5.matmul(T, A), R)


def test_kernel_examples():
    assert kernel_basis(F5.eye(3), F5).shape == (3, 0)
    assert kernel_basis(F5.zeros((3, 3)), F5).shape == (3, 3)
    K = kernel_basis(F5.array([[1, 2], [2, 4]]), F5)
    assert K.shape == (2, 1)
    assert np.array_equal(K[:, 0], F5.array([-2, 1]))


def test_solve_examples():
    B = F5.array([[1, 3], [4, 0]])
    assert np.array_equal(solve(F5.eye(2), B, F5), B)
    assert solve(F5.zeros((2, 2)), F5.array([[1], [0]]), F5) is None
    A = F5.array([[1, 2], [2, 4]])
    X = solve(A, F5.array([[3], [6]]), F5)
    assert np.array_equal(F5.matmul(A, X), F5.array([[3], [6]]))


def test_rational_fractions_are_normalized():
    A = QQ.array([["1/2", "2/4"], ["-3", "-6/2"]])
    assert A[0, 1] == Fraction(1, 2) and A[1, 1] == Fraction(-3)
    R, piv = QQ.rref(A)
    assert piv == [0]
    assert R[0, 1] == 1


def test_float_input_rejected():
    with pytest.raises(TypeError):
        F5.array([[0.5]])
    with pytest.raises(ZeroDivisionError):
        F5.scalar("1/5")


def test_field_must_be_prime():
    with pytest.raises(ValueError):
        Field(6)


def test_large_prime_matmul_is_exact():
    # entries near 2^31 force the limb-splitting path; compare with object arithmetic
    p = 2147483647
    F = Field(p)
    rng = np.random.default_rng(3)
    a = F.random(rng, (7, 40))
    b = F.random(rng, (40, 5))
    ref = np.mod(a.astype(object) @ b.astype(object), p).astype(np.int64)
    assert np.array_equal(F.matmul(a, b), ref)


# -- properties -----------------------------------------------------------

def _mat(draw, F, max_rows=6, max_cols=6):
    m = draw(st.integers(0, max_rows))
    n = draw(st.integers(1, max_cols))
    if F.p is None:
        vals = draw(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4),
                             min_size=m * n, max_size=m * n))
    else:
        vals = draw(st.lists(st.integers(0, F.p - 1), min_size=m * n, max_size=m * n))
    return F.array(np.array(vals, dtype=object).reshape(m, n)) if m else F.zeros((0, n))


fields = st.sampled_from([Field(2), Field(5), Field(101), QQ])


@st.composite
def field_and_matrix(draw):
    F = draw(fields)
    return F, _mat(draw, F)


@settings(max_examples=150, deadline=None)
@given(field_and_matrix())
def test_kernel_property(fa):
    F, A = fa
    K = F.kernel(A)
    assert F.is_zero(F.matmul(A, K)) if A.shape[0] else True
    assert F.rank(A) + K.shape[1] == A.shape[1]
    assert F.rank(K) == K.shape[1]


@settings(max_examples=150, deadline=None)
@given(field_and_matrix())
def test_rank_matches_reference_elimination(fa):
    F, A = fa
    rows = [list(r) for r in A]
    assert F.rank(A) == gauss_rank(rows, F.p)


@settings(max_examples=150, deadline=None)
@given(field_and_matrix())
def test_rref_transform_and_idempotence(fa):
    F, A = fa
    if A.shape[0] == 0:
        return
    R, piv, T = F.rref(A, transform=True)
    assert np.array_equal(F.matmul(T, A), R)
    assert F.rank(T) == T.shape[0]
    R2, piv2 = F.rref(R)
    assert np.array_equal(R2, R) and piv2 == piv
    assert len(piv) == F.rank(A)


@settings(max_examples=150, deadline=None)
@given(field_and_matrix(), st.integers(0, 2**32))
def test_solve_property(fa, seed):
    F, A = fa
    if A.shape[0] == 0:
        return
    rng = np.random.default_rng(seed)
    x = F.random(rng, (A.shape[1], 2))
    B = F.matmul(A, x)
    X = F.solve(A, B)
    assert X is not None and np.array_equal(F.matmul(A, X), B)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 30), st.integers(1, 30), st.integers(1, 30), st.integers(0, 2**32))
def test_matmul_matches_object_arithmetic(m, n, q, seed):
    rng = np.random.default_rng(seed)
    for p in (5, 65521):
        F = Field(p)
        a, b = F.random(rng, (m, n)), F.random(rng, (n, q))
        ref = np.mod(a.astype(object) @ b.astype(object), p).astype(np.int64)
        assert np.array_equal(F.matmul(a, b), ref)
