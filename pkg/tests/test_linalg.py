import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose

from relu_preimage.errors import DegenerateSpectrum, InvalidInput
from relu_preimage.linalg import (SingularSpectrum, condition_number, min_norm_solution,
                                  nullspace_basis, rank, rowspace_basis, singular_values,
                                  spectrum, svd)

from oracles import jacobi_eigh, rref_rank

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def matrices(max_rows=8, max_cols=8):
    shapes = st.tuples(st.integers(1, max_rows), st.integers(1, max_cols))
    return shapes.flatmap(lambda s: arrays(np.float64, s, elements=finite))


def test_identity_and_diagonal():
    assert_allclose(spectrum(np.eye(3)).values, [1, 1, 1])
    S = spectrum(np.diag([3.0, 2.0, 0.0]))
    assert_allclose(S.values, [3, 2, 0])
    assert S.num_nonzero == 2


def test_singular_values_match_jacobi_oracle():
    rng = np.random.default_rng(1)
    for _ in range(20):
        M = rng.standard_normal((5, 3))
        expect = np.sqrt(np.clip(jacobi_eigh(M.T @ M), 0, None))
        assert_allclose(spectrum(M).values, expect, atol=1e-8)


def test_svd_reconstruction_and_orthonormality():
    rng = np.random.default_rng(2)
    for t in range(1000):
        m, n = rng.integers(1, 65, size=2)
        M = rng.standard_normal((m, n)) * 10.0 ** rng.uniform(-3, 3)
        if t % 7 == 0:
            M[:, rng.integers(n)] = 0.0
        U, S, Vt = svd(M)
        r = min(m, n)
        assert U.shape == (m, r) and Vt.shape == (r, n)
        fro = np.linalg.norm(M)
        assert np.linalg.norm(U @ np.diag(S.values) @ Vt - M) <= 1e-10 * (fro + 1)
        assert np.linalg.norm(U.T @ U - np.eye(r)) <= 1e-10 * max(1, r)
        assert np.linalg.norm(Vt @ Vt.T - np.eye(r)) <= 1e-10 * max(1, r)


@settings(max_examples=100, deadline=None)
@given(matrices(), st.randoms(use_true_random=False))
def test_spectrum_sorted_and_permutation_invariant(M, rnd):
    S = spectrum(M)
    assert np.all(np.diff(S.values) <= 0)
    assert S.num_nonzero == np.count_nonzero(S.values > S.zero_tol)
    perm = list(range(M.shape[0]))
    rnd.shuffle(perm)
    assert_allclose(singular_values(M[perm]), S.values, atol=1e-9 * (1 + S.sigma_max))


def test_rank_examples():
    assert rank(np.zeros((4, 4))) == 0
    assert rank(np.eye(4)) == 4
    M = np.array([[1.0, 2, 3], [4, 5, 9], [7, 8, 15], [1, 0, 1]])
    assert rref_rank(M) == 2
    assert rank(M) == 2


def test_rank_matches_elimination_on_low_rank_products():
    rng = np.random.default_rng(3)
    for _ in range(100):
        m, n = rng.integers(2, 10, size=2)
        r = int(rng.integers(0, min(m, n) + 1))
        M = rng.standard_normal((m, r)) @ rng.standard_normal((r, n))
        assert rank(M) == r == rref_rank(M)


def test_nullspace_examples():
    O = nullspace_basis([[1.0, 0, 0]])
    assert_allclose(O @ O.T, np.eye(2), atol=1e-12)
    assert_allclose(np.array([[1.0, 0, 0]]) @ O.T, 0, atol=1e-12)
    assert nullspace_basis(np.array([[2.0, 1], [1, 3]])).shape == (0, 2)
    M = np.array([[1.0, 1, 0], [0, 0, 0]])
    O = nullspace_basis(M)
    assert O.shape == (2, 3)
    assert_allclose(M @ O.T, 0, atol=1e-12)
    # the basis spans (1,-1,0) and e3
    P = O.T @ O
    assert_allclose(P @ np.array([1, -1, 0]), [1, -1, 0], atol=1e-12)
    assert_allclose(P @ np.array([0, 0, 1.0]), [0, 0, 1], atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_nullspace_and_rowspace_are_complementary(M):
    n = M.shape[1]
    O = nullspace_basis(M)
    R = rowspace_basis(M)
    assert O.shape[0] + R.shape[0] == n
    assert R.shape[0] == rank(M)
    Q = np.vstack([R, O])
    assert_allclose(Q @ Q.T, np.eye(n), atol=1e-9)
    if O.shape[0]:
        assert np.linalg.norm(M @ O.T) <= 1e-8 * (np.linalg.norm(M) + 1)


def test_rowspace_of_empty_matrix_is_everything():
    assert_allclose(rowspace_basis(np.zeros((0, 3))), np.zeros((0, 3)))
    assert_allclose(nullspace_basis(np.zeros((0, 3))), np.eye(3))


def test_condition_number_examples():
    assert condition_number(SingularSpectrum.from_values([1, 1, 1], 1e-12)) == 1.0
    assert condition_number(SingularSpectrum.from_values([4, 2], 1e-12)) == 2.0
    # 1e-20 sits below zero_tol, so 3 is both the largest and smallest nonzero value
    assert condition_number(SingularSpectrum.from_values([3, 1e-20], 1e-12)) == 1.0
    with pytest.raises(DegenerateSpectrum):
        condition_number(SingularSpectrum.from_values([0, 0], 1e-12))


def test_min_norm_solution_is_orthogonal_to_nullspace():
    rng = np.random.default_rng(4)
    M = rng.standard_normal((2, 5))
    rhs = rng.standard_normal(2)
    x = min_norm_solution(M, rhs)
    assert_allclose(M @ x, rhs, atol=1e-12)
    assert_allclose(nullspace_basis(M) @ x, 0, atol=1e-12)
    assert_allclose(x, np.linalg.pinv(M) @ rhs, atol=1e-12)


@pytest.mark.parametrize("bad", [[[np.nan, 1.0]], [[np.inf]], [1.0, 2.0]])
def test_invalid_input(bad):
    with pytest.raises(InvalidInput):
        svd(bad)
    with pytest.raises(InvalidInput):
        rank(bad)
