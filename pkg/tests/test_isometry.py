import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from miso_lab import isometry as iso
from miso_lab import numerics as nx
from miso_lab.errors import ClassError, ContractViolation
from miso_lab.experiments import families as fam

from strategies import complex_matrices, seeds


def unilateral_shift_compression(n):
    return np.eye(n, k=-1)


def test_beta_small_orders():
    t = np.array([[2.0]])
    assert iso.beta(t, 0).matrix[0, 0] == 1
    assert iso.beta(t, 1).matrix[0, 0] == 3
    assert iso.beta(t, 2).matrix[0, 0] == pytest.approx(16 - 8 + 1)


def test_unitary_is_one_isometric(rng):
    u = fam.random_unitary(rng, 5)
    cls = iso.classify(u, 1)
    assert cls.verdict == iso.M_ISOMETRIC


def test_jordan_block_at_one_is_three_isometric():
    # I + N with N^2 = 0 is a 3-isometry but not a 2-isometry
    t = np.eye(2) + fam.nilpotent_witness()
    assert iso.classify(t, 3).verdict == iso.M_ISOMETRIC
    assert iso.classify(t, 2).verdict != iso.M_ISOMETRIC


def test_contraction_is_one_concave():
    t = 0.5 * np.eye(3)
    assert iso.classify(t, 1).verdict == iso.M_CONCAVE


def test_classify_rejects_order_zero():
    with pytest.raises(ContractViolation):
        iso.classify(np.eye(2), 0)


@given(complex_matrices(max_dim=10), st.integers(0, 6))
def test_beta_recursion(t, m):
    assert iso.beta_recursion_residual(t, m) <= 1e-9


@given(complex_matrices(max_dim=10), st.integers(0, 6))
def test_sum_of_defects(t, k):
    assert iso.sum_of_defects_residual(t, k) <= 1e-9


@given(complex_matrices(max_dim=8), st.integers(1, 4), st.integers(0, 3))
def test_shifted_defect(t, m, j):
    assert iso.shifted_defect_residual(t, m, j) <= 1e-9


@given(complex_matrices(max_dim=6))
def test_beta_is_hermitian(t):
    assert nx.is_hermitian(iso.beta(t, 3).matrix)


def test_discrete_growth_for_three_isometry(rng):
    t = np.eye(2) + fam.nilpotent_witness()
    res = iso.discrete_growth_check(t, fam.random_vector(rng, 2), 12, 3)
    assert max(res) <= 1e-12


def test_discrete_growth_concave_bound_holds(rng):
    t = 0.8 * fam.random_unitary(rng, 4)
    res = iso.discrete_growth_check(t, fam.random_vector(rng, 4), 10, 1, declared=iso.M_CONCAVE)
    assert max(res) <= 1e-12


def test_discrete_growth_raises_on_class_mismatch(rng):
    with pytest.raises(ClassError):
        iso.discrete_growth_check(2 * np.eye(2), np.ones(2), 5, 1)


@pytest.mark.parametrize("i,n,m", [(0, 0, 1), (0, 5, 1), (2, 7, 3), (10, 30, 10)])
def test_binom_sum_examples(i, n, m):
    assert iso.binom_sum_lhs(i, n, m) == iso.binom_sum_rhs(i, n, m)


def test_binom_sum_m_one_gives_one():
    # C(N-i, N-i) = 1
    assert all(iso.binom_sum_lhs(i, 9, 1) == 1 for i in range(10))


def test_binom_sum_sweep_is_clean():
    assert iso.binom_sum_sweep(30, 10) == []


def test_binom_sum_rejects_bad_indices():
    with pytest.raises(ContractViolation):
        iso.binom_sum_verify(3, 2, 1)


def test_wold_split_unitary():
    u = np.diag(np.exp(1j * np.array([0.3, 1.1, 2.0])))
    split = iso.wold_split(u)
    assert split.unitary_basis.shape[1] == 3
    assert split.analytic_basis.shape[1] == 0


def test_wold_split_truncated_shift_is_analytic():
    split = iso.wold_split(unilateral_shift_compression(6))
    assert split.unitary_basis.shape[1] == 0
    assert split.analytic_basis.shape[1] == 6


def test_wold_split_direct_sum(rng):
    t = np.zeros((5, 5), dtype=complex)
    t[:2, :2] = np.diag([1j, -1.0])
    t[2:, 2:] = unilateral_shift_compression(3)
    split = iso.wold_split(t)
    assert split.unitary_basis.shape[1] == 2
    assert split.analytic_basis.shape[1] == 3
    assert np.allclose(split.unitary_basis.conj().T @ split.analytic_basis, 0, atol=1e-10)
