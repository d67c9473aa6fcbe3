import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import polar_via_svd
from unitarylab import numerics as nx
from unitarylab.errors import ContractViolation, DimensionError, SingularityError


def rand_complex(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


seeds = st.integers(0, 2**32 - 1)


def test_svd_values_trivial_cases():
    assert np.allclose(nx.svd_values(np.eye(4)), [1, 1, 1, 1])
    assert np.allclose(nx.svd_values(np.ones((2, 2))), [2, 0])


def test_svd_values_rejects_empty():
    with pytest.raises(DimensionError):
        nx.svd_values(np.zeros((0, 0)))


def test_polar_fixes_unitaries_and_removes_scale():
    U = nx.haar_unitary(5, np.random.default_rng(1))
    assert np.allclose(nx.polar_unitary(U), U, atol=1e-12)
    assert np.allclose(nx.polar_unitary(2 * np.eye(3)), np.eye(3), atol=1e-15)


def test_polar_matches_svd_oracle():
    M = rand_complex(np.random.default_rng(7), 5)
    assert np.max(np.abs(nx.polar_unitary(M) - polar_via_svd(M))) < 1e-12


def test_polar_rejects_rank_deficient():
    with pytest.raises(SingularityError):
        nx.polar_unitary(np.ones((3, 3)))


def test_rank_from_singulars():
    assert nx.rank_from_singulars([3, 2, 1e-14], 1e-8) == 2
    assert nx.rank_from_singulars([0, 0, 0], 1e-8) == 0


def test_matrix_exponential_examples():
    assert np.allclose(nx.matrix_exponential_hermitian(np.zeros((3, 3))), np.eye(3))
    E = nx.matrix_exponential_hermitian(np.diag([np.pi, 0.0]))
    assert np.allclose(E, np.diag([-1, 1]), atol=1e-15)
    G = np.random.default_rng(3).standard_normal((36, 36))
    U = nx.matrix_exponential_hermitian(0.025 * (G + G.T))
    assert nx.unitarity_residual(U) < 1e-12


def test_matrix_exponential_rejects_non_hermitian():
    with pytest.raises(ContractViolation):
        nx.matrix_exponential_hermitian(np.array([[0, 1], [0, 0]]))


def test_as_matrix_rejects_nan():
    with pytest.raises(ContractViolation):
        nx.as_matrix([[1, np.nan], [0, 1]])


def test_json_and_text_roundtrip(tmp_path):
    M = rand_complex(np.random.default_rng(0), 3, 4)
    p = tmp_path / "m.json"
    nx.save_matrix(p, M)
    assert np.array_equal(nx.load_matrix(p), M)
    t = tmp_path / "m.txt"
    t.write_text("# comment\n1 2+1i\n-1i 0.5\n")
    assert np.array_equal(nx.load_matrix(t), np.array([[1, 2 + 1j], [-1j, 0.5]]))


def test_tolerance_config_validates():
    with pytest.raises(ValueError):
        nx.ToleranceConfig(unitarity_tol=0.0)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 7))
def test_polar_idempotent(seed, n):
    M = rand_complex(np.random.default_rng(seed), n)
    P = nx.polar_unitary(M)
    assert np.max(np.abs(nx.polar_unitary(P) - P)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 7), st.integers(2, 7))
def test_svd_unitary_invariance(seed, n, m):
    rng = np.random.default_rng(seed)
    M = rand_complex(rng, n, m)
    A, B = nx.haar_unitary(n, rng), nx.haar_unitary(m, rng)
    assert np.allclose(nx.svd_values(A @ M @ B), nx.svd_values(M), atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 8), st.integers(1, 8))
def test_singular_squares_sum_to_frobenius(seed, n, m):
    M = rand_complex(np.random.default_rng(seed), n, m)
    fro = np.linalg.norm(M) ** 2
    assert abs(np.sum(nx.svd_values(M) ** 2) - fro) <= 1e-10 * fro
