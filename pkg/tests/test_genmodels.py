import numpy as np
import pytest
from hypothesis import given, strategies as st

from hessplit.genmodels import (
    GeneratorSpec,
    birth_death_matrix,
    excess_m_matrix,
    load_generator,
    random_hessenberg_m_matrix,
    two_queue_generator,
)
from hessplit.matcore import BlockPartition, certify_m_matrix, is_lower_hessenberg, is_z_matrix
from hessplit.mmio import MatrixMarketError, read_matrix_market, write_matrix_market, write_partition
from hessplit.singular import steady_state
from hessplit.spectra import eigenvalues, radius
from hessplit.splitlib import splitting

seeds = st.integers(0, 2**63 - 1)


@given(st.integers(2, 15), seeds)
def test_random_hessenberg_construction(n, seed):
    A, u, v = random_hessenberg_m_matrix(n, seed)
    assert np.max(np.abs(A @ u - v)) <= 1e-13 * n * max(1.0, np.abs(A).max())
    assert is_lower_hessenberg(A)
    off = ~np.eye(n, dtype=bool)
    assert np.all(A[off] <= 0)
    assert certify_m_matrix(A, u, v=v) is not None


def test_golden_seed42(data_dir):
    A, _, _ = random_hessenberg_m_matrix(5, 42)
    np.testing.assert_array_equal(A, read_matrix_market(data_dir / "golden_seed42_n5.mtx"))


def test_seed_determinism():
    a = GeneratorSpec("random_hessenberg", n=7, seed=123).build()[0]
    b = GeneratorSpec("random_hessenberg", n=7, seed=123).build()[0]
    assert a.tobytes() == b.tobytes()


def test_small_n_rejected():
    with pytest.raises(ValueError):
        random_hessenberg_m_matrix(1, 0)


@given(st.integers(2, 10), st.floats(1e-6, 1e3), seeds)
def test_excess_row_sums(n, eta, seed):
    A = excess_m_matrix(n, eta, seed)
    np.testing.assert_allclose(A.sum(axis=1), eta, rtol=0, atol=1e-13 * max(1.0, np.abs(A).max()) * n)


def test_excess_bad_eta():
    with pytest.raises(ValueError):
        excess_m_matrix(5, 0.0, 1)


@pytest.mark.parametrize("seed", range(10))
def test_excess_extremes(seed):
    small = radius(splitting(excess_m_matrix(5, 1e-8, seed), "gs"))
    assert 1 - 1e-3 < small < 1
    big = [radius(splitting(excess_m_matrix(5, 10.0, seed), k)) for k in ("gs", "stair1", "ags")]
    assert max(big) < 0.5


def test_birth_death_s2_n4():
    lam, mu = 0.9, 0.1
    A = birth_death_matrix(4, 2, lam, mu)
    np.testing.assert_allclose(np.diag(A), [lam, lam + mu, lam + 2 * mu, 2 * mu])
    np.testing.assert_allclose(np.diag(A, 1), [-mu, -2 * mu, -2 * mu])
    np.testing.assert_allclose(np.diag(A, -1), [-lam] * 3)
    np.testing.assert_allclose(A.sum(axis=0), 0, atol=1e-15)


def test_two_queue_structure():
    Q, part = two_queue_generator(21, 5, 0.9, 0.1, 1.0)
    assert Q.shape == (441, 441) and part == BlockPartition.uniform(21, 21)
    assert np.max(np.abs((-Q).sum(axis=0))) <= 1e-12
    lab = part.labels()
    assert np.all(Q[np.abs(lab[:, None] - lab[None, :]) > 1] == 0)
    assert np.min(np.abs(eigenvalues(Q))) < 1e-10


def test_two_queue_minus_q_is_singular_m_matrix():
    Q, part = two_queue_generator(6, 2, 0.9, 0.1, 1.0)
    A = -Q
    x = steady_state(A, partition=part, tol=1e-13)
    # a Z-matrix with a positive kernel vector is a singular M-matrix
    assert is_z_matrix(A) and np.all(x > 0)
    assert np.max(np.abs(A @ x)) < 1e-12
    assert np.max(np.abs(A.sum(axis=0))) < 1e-12
    # the nonsingular certificate correctly refuses: A x has no positive entry
    assert certify_m_matrix(A, x, tol=1e-10) is None
    assert np.min(eigenvalues(A).real) > -1e-10


@pytest.mark.parametrize("args", [(3, 4, 0.9, 0.1, 1.0), (3, 0, 0.9, 0.1, 1.0), (3, 2, -1, 0.1, 1.0),
                                  (3, 2, 0.9, 0.0, 1.0), (3, 2, 0.9, 0.1, 0.0), (3.5, 2, 0.9, 0.1, 1.0)])
def test_two_queue_domain(args):
    with pytest.raises(ValueError):
        two_queue_generator(*args)


def test_load_round_trip(tmp_path):
    A = np.random.default_rng(0).standard_normal((6, 6))
    write_matrix_market(tmp_path / "a.mtx", A)
    write_partition(tmp_path / "a.part", BlockPartition((3, 3)))
    B, part = load_generator(tmp_path / "a.mtx", tmp_path / "a.part")
    np.testing.assert_array_equal(A, B)
    assert part.sizes == (3, 3)
    assert load_generator(tmp_path / "a.mtx")[1] is None


def test_load_errors(tmp_path):
    with pytest.raises(OSError):
        load_generator(tmp_path / "missing.mtx")
    write_matrix_market(tmp_path / "a.mtx", np.eye(4))
    (tmp_path / "bad.part").write_text("3\n3\n")
    with pytest.raises(MatrixMarketError, match="partition mismatch"):
        load_generator(tmp_path / "a.mtx", tmp_path / "bad.part")


@pytest.mark.parametrize("kwargs", [
    dict(family="random_hessenberg", n=5),
    dict(family="random_hessenberg", n=5, seed=1, eta=2.0),
    dict(family="excess", n=5, seed=1),
    dict(family="two_queue", queue_params=(3, 2, 0.9, 0.1)),
    dict(family="file"),
    dict(family="nope", n=5, seed=1),
])
def test_spec_field_validation(kwargs):
    with pytest.raises(ValueError):
        GeneratorSpec(**kwargs)


def test_spec_describe():
    d = GeneratorSpec("two_queue", queue_params=(21, 5, 0.9, 0.1, 1.0)).describe()
    assert d == {"family": "two_queue", "queue_params": [21, 5, 0.9, 0.1, 1.0]}
