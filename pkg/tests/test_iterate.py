from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hessplit.genmodels import random_hessenberg_m_matrix, two_queue_generator
from hessplit.iterate import (
    SingularSplittingError,
    iteration_matrix,
    solve_M,
    solve_stationary,
    staircase_phases,
    staircase_sweep_two_phase,
    sweep,
)
from hessplit.matcore import BlockPartition
from hessplit.singular import primed_splitting
from hessplit.splitlib import Splitting, custom_splitting, sor_splitting, splitting, stair_splitting

seeds = st.integers(0, 10**6)
KINDS = ["jacobi", "gs", "ags", "stair1", "stair2"]


def test_iteration_matrix_2x2(a2):
    np.testing.assert_allclose(iteration_matrix(splitting(a2, "gs")), [[0, 0.5], [0, 0.25]], atol=1e-16)
    np.testing.assert_allclose(iteration_matrix(splitting(a2, "jacobi")), [[0, 0.5], [0.5, 0]], atol=1e-16)


def test_iteration_matrix_zero_n(a2):
    s = custom_splitting(a2, a2)
    np.testing.assert_array_equal(iteration_matrix(s), np.zeros((2, 2)))


def test_singular_M_detected(a2):
    s = Splitting(A=a2, M=np.ones((2, 2)), N=np.ones((2, 2)) - a2, kind="custom")
    with pytest.raises(SingularSplittingError, match="M singular"):
        iteration_matrix(s)


def test_gs_sweep_by_hand(a2):
    np.testing.assert_allclose(sweep(splitting(a2, "gs"), [0, 0], [1, 1]), [0.5, 0.75], rtol=0, atol=1e-16)


def test_sweep_with_zero_N_ignores_x(a2):
    s = custom_splitting(a2, a2)
    np.testing.assert_allclose(sweep(s, [5.0, -3.0], [1, 1]), [1, 1], rtol=1e-15)


def test_sweep_shape_check(a2):
    with pytest.raises(ValueError):
        sweep(splitting(a2, "gs"), [0, 0, 0], [1, 1])


def _random_block(n, seed):
    part = BlockPartition([2] * (n // 2) + [1] * (n % 2))
    return random_hessenberg_m_matrix(n, seed)[0], part


@given(st.integers(3, 9), seeds, st.sampled_from(KINDS), st.booleans())
def test_sweep_matches_matrix_form(n, seed, kind, block):
    A, part = _random_block(n, seed)
    s = splitting(A, kind, part if block else None)
    rng = np.random.default_rng(seed)
    x, b = rng.standard_normal(n), rng.standard_normal(n)
    ref = iteration_matrix(s) @ x + solve_M(s, b)
    np.testing.assert_allclose(sweep(s, x, b), ref, rtol=1e-12, atol=1e-12 * np.abs(ref).max())


@given(st.integers(3, 9), seeds, st.sampled_from(["gsor", "agsor", "stsor", "stsor2"]),
       st.floats(0.1, 1.9), st.booleans())
def test_sor_componentwise_matches_matrix_form(n, seed, kind, omega, block):
    A, part = _random_block(n, seed)
    s = sor_splitting(A, kind, omega, part if block else None)
    rng = np.random.default_rng(seed + 1)
    x, b = rng.standard_normal(n), rng.standard_normal(n)
    ref = np.linalg.solve(s.M, s.N @ x + b)
    np.testing.assert_allclose(sweep(s, x, b), ref, rtol=1e-12, atol=1e-12 * np.abs(ref).max())


@given(st.integers(3, 9), seeds, st.sampled_from(KINDS + ["gsor"]))
def test_fixed_point(n, seed, kind):
    A = random_hessenberg_m_matrix(n, seed)[0]
    b = np.random.default_rng(seed).random(n)
    xs = np.linalg.solve(A, b)
    s = splitting(A, kind, omega=0.8)
    np.testing.assert_allclose(sweep(s, xs, b), xs, rtol=1e-10)


def test_phases_of_3x3_example():
    A = np.array([[3.0, -1, 0], [-1, 3, -1], [-1, -1, 3]])
    assert staircase_phases(stair_splitting(A, 1)) == [[0, 2], [1]]


@given(st.integers(2, 12), seeds, st.sampled_from([1, 2]), st.booleans())
def test_two_phase_equals_sweep_exactly(n, seed, kind, block):
    A, part = _random_block(n, seed)
    s = stair_splitting(A, kind, part if block else None)
    rng = np.random.default_rng(seed)
    x, b = rng.standard_normal(n), rng.standard_normal(n)
    np.testing.assert_array_equal(staircase_sweep_two_phase(s, x, b), sweep(s, x, b))


def test_two_phase_rejects_gs(a2):
    with pytest.raises(ValueError):
        staircase_sweep_two_phase(splitting(np.diag([2.0] * 4) - np.eye(4, k=-1), "gs"), np.zeros(4), np.ones(4))


def test_two_phase_on_two_queue_block():
    Q, part = two_queue_generator(21, 5, 0.9, 0.1, 1.0)
    s = primed_splitting(-Q, "stair1", part)
    rng = np.random.default_rng(7)
    x, b = rng.random(441), np.zeros(441)
    seq = sweep(s, x, b)
    with ThreadPoolExecutor(4) as pool:
        par = staircase_sweep_two_phase(s, x, b, executor=pool)
    np.testing.assert_array_equal(par, seq)


def test_solve_trivial():
    A = random_hessenberg_m_matrix(4, 0)[0]
    h = solve_stationary(splitting(A, "gs"), np.zeros(4), np.zeros(4))
    assert h.converged and h.iterations == 0 and np.all(h.final_x == 0)
    assert len(h.residual_norms) == 1


def test_solve_2x2(a2):
    h = solve_stationary(splitting(a2, "gs"), np.ones(2), tol=1e-12)
    assert h.converged
    np.testing.assert_allclose(h.final_x, [1, 1], rtol=1e-11)
    assert len(h.residual_norms) == h.iterations + 1


@pytest.mark.parametrize("seed", range(10))
def test_ags_needs_no_more_sweeps_than_gs(seed):
    A = random_hessenberg_m_matrix(5, seed)[0]
    b = np.ones(5)
    h_gs = solve_stationary(splitting(A, "gs"), b, tol=1e-10)
    h_ags = solve_stationary(splitting(A, "ags"), b, tol=1e-10)
    assert h_gs.converged and h_ags.converged
    assert h_ags.iterations <= h_gs.iterations + 2


def test_divergence_flagged(a2):
    s = sor_splitting(a2, "gsor", 2.5)
    h = solve_stationary(s, np.ones(2), x0=np.ones(2) * 3, max_sweeps=5000)
    assert h.diverged and not h.converged
