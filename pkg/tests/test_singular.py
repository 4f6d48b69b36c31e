import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from hessplit.genmodels import two_queue_generator
from hessplit.iterate import iteration_matrix
from hessplit.matcore import certify_m_matrix, is_lower_hessenberg
from hessplit.singular import (
    GeneratorFormError,
    l_transform,
    normalize_to_generator,
    primed_splitting,
    random_singular_hessenberg,
    steady_state,
)
from hessplit.spectra import convergence_factor

H = np.array([[0.5, -0.5], [-0.5, 0.5]])
seeds = st.integers(0, 10**6)


def test_normalize_examples():
    np.testing.assert_array_equal(normalize_to_generator(H), H)
    np.testing.assert_array_equal(normalize_to_generator(2 * H), H)


def test_normalize_two_queue():
    Q, _ = two_queue_generator(21, 5, 0.9, 0.1, 1.0)
    B = normalize_to_generator(-Q)
    T = np.eye(441) - B
    assert np.max(np.abs(B.sum(axis=0))) < 1e-12 and np.max(np.diag(B)) == 0.5
    assert T.min() >= 0 and np.allclose(T.sum(axis=0), 1)


def test_normalize_rejects_row_orientation():
    A = np.array([[1.0, -1, 0], [0, 1, -1], [-0.5, -0.5, 1]])
    with pytest.raises(GeneratorFormError, match="not a generator-form matrix.*transpose"):
        normalize_to_generator(A)
    normalize_to_generator(A.T)


def test_normalize_rejects_bad_diagonal():
    with pytest.raises(GeneratorFormError):
        normalize_to_generator(np.array([[0.0, 0], [0, 1]]))


def test_l_transform_2x2():
    lt = l_transform(H)
    np.testing.assert_array_equal(lt.B, [[0.5, -0.5], [0, 0]])
    np.testing.assert_array_equal(lt.A_trunc, [[0.5]])
    np.testing.assert_array_equal(lt.L @ lt.L_inverse, np.eye(2))


def test_l_transform_rejects_nonzero_column_sums():
    with pytest.raises(GeneratorFormError):
        l_transform(np.array([[1.0, -0.5], [-0.5, 1]]))


@given(st.integers(2, 10), seeds)
def test_l_transform_invariants(n, seed):
    A = random_singular_hessenberg(n, seed)
    lt = l_transform(A)
    assert np.all(lt.B[-1] == 0)
    np.testing.assert_allclose((lt.L @ A)[-1], 0, atol=1e-12 * np.abs(A).max())
    assert is_lower_hessenberg(lt.A_trunc)
    assert certify_m_matrix(lt.A_trunc) is not None


def test_primed_gs_2x2():
    s = primed_splitting(H, "gs")
    np.testing.assert_allclose(s.M, [[0.5, 0], [-0.5, 1]])
    np.testing.assert_allclose(s.N, [[0, 0.5], [0, 0.5]])
    P = iteration_matrix(s)
    np.testing.assert_allclose(P, [[0, 1], [0, 1]], atol=1e-15)
    assert convergence_factor(P).gamma == pytest.approx(0, abs=1e-15)


@given(st.integers(3, 10), seeds, st.sampled_from(["jacobi", "gs", "ags", "stair1", "stair2"]))
def test_primed_identity_and_unit_eigenvalue(n, seed, kind):
    A = random_singular_hessenberg(n, seed)
    s = primed_splitting(A, kind)
    np.testing.assert_allclose(s.M - s.N, A, atol=1e-14)
    assert s.base_regular
    # last row of N' is -e^T N_trunc, so the lifted pair is regular only when N_trunc = 0 off the last column
    assert np.all(s.N[:-1] >= 0)
    assert convergence_factor(iteration_matrix(s)).one_eigenvalue_present


@given(st.integers(3, 10), seeds)
def test_gamma_ordering(n, seed):
    A = random_singular_hessenberg(n, seed)
    g = [convergence_factor(iteration_matrix(primed_splitting(A, k))).gamma
         for k in ("jacobi", "gs", "stair1", "ags")]
    assert all(a >= b - 1e-9 for a, b in zip(g, g[1:]))


def test_primed_sor_needs_omega():
    with pytest.raises(ValueError):
        primed_splitting(H, "gsor")


def test_primed_block_partition():
    Q, part = two_queue_generator(4, 2, 0.9, 0.1, 1.0)
    s = primed_splitting(-Q, "gs", part)
    assert s.partition.sizes == (4, 4, 4, 3, 1)
    assert s.order.perm == (0, 1, 2, 3, 4)
    np.testing.assert_allclose(s.M - s.N, -Q, atol=1e-14)


def test_steady_state_2x2():
    np.testing.assert_allclose(steady_state(H), [0.5, 0.5], atol=1e-10)


@pytest.mark.parametrize("seed", range(5))
def test_steady_state_matches_null_space(seed):
    A = random_singular_hessenberg(5, seed)
    x = steady_state(A, tol=1e-12)
    k = scipy.linalg.null_space(A)[:, 0]
    k = k / k.sum()
    np.testing.assert_allclose(x, k, atol=1e-8)


def test_steady_state_two_queue():
    Q, part = two_queue_generator(21, 5, 0.9, 0.1, 1.0)
    x, hist = steady_state(-Q, kind="gs", partition=part, return_history=True)
    assert hist.converged
    assert np.all(x >= -1e-15) and x.sum() == pytest.approx(1)
    assert np.max(np.abs(Q @ x)) <= 1e-8
