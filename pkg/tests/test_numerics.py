import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from miso_lab import numerics as nx
from miso_lab.errors import ContractViolation, Singular, SingularGram
from miso_lab.experiments import families as fam

from strategies import complex_matrices, seeds


def test_scale_is_one_plus_largest_entry():
    assert nx.scale(np.array([[1, -3j]]), np.array([2.0])) == 4.0
    assert nx.scale() == 1.0


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(ContractViolation):
        nx.herm_eig(np.array([[0, 1], [0, 0]]))


@given(seeds(), st.integers(1, 8))
def test_herm_eig_reconstructs(rng, n):
    h = fam.random_hermitian(rng, n)
    w, v = nx.herm_eig(h)
    assert np.all(np.diff(w) >= 0)
    assert np.allclose(v @ np.diag(w) @ v.conj().T, h, atol=1e-12)
    assert np.allclose(v.conj().T @ v, np.eye(n), atol=1e-12)


@given(seeds(), st.integers(1, 7))
def test_gen_eig_routes_agree(rng, n):
    q = fam.random_hermitian(rng, n)
    b = fam.random_matrix(rng, n)
    g = b @ b.conj().T + 0.1 * np.eye(n)
    x = nx.gen_eig_max(q, g)
    assert abs(x - nx.gen_eig_max_whitened(q, g)) <= 1e-9 * (1 + abs(x))


def test_gen_eig_max_identity_denominator_is_lambda_max():
    q = np.diag([1.0, -2.0, 5.0])
    assert nx.gen_eig_max(q, np.eye(3)) == pytest.approx(5.0)


def test_singular_gram_reports_min_eigenvalue():
    with pytest.raises(SingularGram) as info:
        nx.gen_eig_max(np.eye(2), np.diag([1.0, 0.0]))
    assert info.value.min_eigenvalue == pytest.approx(0.0, abs=1e-15)


def test_mat_exp_known_values():
    assert np.allclose(nx.mat_exp(np.zeros((3, 3))), np.eye(3))
    n = fam.nilpotent_witness()
    assert np.allclose(nx.mat_exp(n, 2.5), np.eye(2) + 2.5 * n, atol=1e-15)
    rot = np.array([[0, -1], [1, 0]], dtype=complex)
    t = 1.3
    assert np.allclose(nx.mat_exp(rot, t), [[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]], atol=1e-14)


@given(complex_matrices(max_dim=8, scale=4.0), st.floats(0, 3))
def test_mat_exp_matches_scipy(a, t):
    ref = scipy.linalg.expm(t * a)
    assert nx.opnorm(nx.mat_exp(a, t) - ref) <= 1e-11 * nx.scale(ref)


@given(complex_matrices(max_dim=6))
def test_mat_exp_semigroup_property(a):
    lhs = nx.mat_exp(a, 0.7) @ nx.mat_exp(a, 0.4)
    assert nx.opnorm(lhs - nx.mat_exp(a, 1.1)) <= 1e-12 * nx.scale(lhs)


@given(complex_matrices(max_dim=6))
def test_taylor_oracle_small_argument(a):
    assert nx.opnorm(nx.mat_exp(a, 0.2) - nx.taylor_series_exp(a, 0.2)) <= 1e-13


def test_solve_raises_on_singular():
    with pytest.raises(Singular):
        nx.solve(np.array([[1, 2], [2, 4]]), np.eye(2))


@given(seeds(), st.integers(1, 8))
def test_inv_roundtrip(rng, n):
    a = fam.random_matrix(rng, n) + 3 * np.eye(n)
    assert np.allclose(a @ nx.inv(a), np.eye(n), atol=1e-12)


def test_orth_and_null_space():
    a = np.array([[1, 2, 3], [2, 4, 6]], dtype=complex)
    assert nx.orth(a).shape == (2, 1)
    k = nx.null_space(a)
    assert k.shape == (3, 2)
    assert np.allclose(a @ k, 0, atol=1e-12)
    assert nx.orth(np.zeros((3, 2))).shape == (3, 0)
