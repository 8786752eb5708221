import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from miso_lab import dirichlet as dr
from miso_lab import isometry as iso
from miso_lab import measures as ms
from miso_lab import numerics as nx
from miso_lab import semigroup as sg
from miso_lab.errors import ContractViolation, PoleAtOne

from strategies import angles, seeds

P = dr.VecPoly.scalar
NEG1 = ms.point_mass(1)
LEB = ms.lebesgue()


def rank_one_dim2():
    x = np.array([1.0, 1j])
    return ms.OperatorMeasure(2, ((Fraction(1, 3), 2 * math.pi * np.outer(x, x.conj())),))


def random_poly(rng, degree, dim=1):
    return dr.VecPoly(rng.standard_normal((degree + 1, dim)) + 1j * rng.standard_normal((degree + 1, dim)))


@st.composite
def atomic_measures(draw, dim=1):
    n = draw(st.integers(1, 3))
    atoms = []
    for _ in range(n):
        a = draw(angles)
        rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
        b = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        atoms.append((a, b @ b.conj().T))
    return ms.OperatorMeasure(dim, tuple(atoms))


def test_vecpoly_trims_trailing_zeros():
    assert P(1, 2, 0, 0).degree == 1
    assert P(0, 0).degree == -1


def test_gram_lebesgue_is_diagonal():
    g = dr.gram(LEB, 6).G
    assert np.array_equal(g, np.diag(np.arange(1, 8)).astype(complex))


def test_gram_zero_measure_is_identity():
    assert np.array_equal(dr.gram(ms.zero(2), 3).G, np.eye(8))


def test_gram_point_mass_minus_one():
    g = dr.gram(NEG1, 3).G
    assert g[1, 1] == pytest.approx(2)
    assert g[2, 1] == pytest.approx(-1) and g[1, 2] == pytest.approx(-1)
    for k in range(4):
        for l in range(4):
            assert g[k, l] == pytest.approx((k == l) + min(k, l) * (-1) ** (l - k), abs=1e-15)


@pytest.mark.parametrize("mu", [NEG1, LEB, ms.abs_one_minus_zeta_fejer(), rank_one_dim2()])
def test_gram_hermitian_and_above_identity(mu):
    g = dr.gram(mu, 10).G
    assert nx.is_hermitian(g)
    assert nx.lambda_min(g) >= 1 - 1e-10


def test_dirichlet_energy_examples():
    assert dr.dirichlet_energy(NEG1, P(3)) == 0
    assert dr.dirichlet_energy(NEG1, P(0, 1)) == pytest.approx(1)
    assert dr.dirichlet_energy(LEB, P(0, 0, 1)) == pytest.approx(2)


def test_boundary_form_examples():
    f = random_poly(np.random.default_rng(1), 5)
    assert dr.boundary_form(LEB, f, f).real == pytest.approx(f.h2_norm_sq())
    x = np.array([[1.0, 2j]])
    mu = rank_one_dim2()
    assert dr.boundary_form(mu, x, x) == pytest.approx(np.vdot(x[0], ms.fourier(mu, 0) @ x[0]))
    assert abs(dr.boundary_form(NEG1, P(1, 1), P(1, 1))) < 1e-15


@given(seeds(), st.integers(0, 6))
def test_defect_formula(rng, deg):
    mu = ms.point_mass(Fraction(int(rng.integers(0, 8)), 4), rng.uniform(0.1, 3)) + LEB
    assert dr.defect_formula_residual(mu, random_poly(rng, deg)) <= 1e-10


def test_defect_formula_examples():
    assert dr.defect_formula_residual(ms.zero(), P(1, 2)) == 0
    assert dr.defect_formula_residual(LEB, P(1)) == 0
    assert dr.boundary_form(LEB, P(1), P(1)).real == 1


@pytest.mark.parametrize("mu", [NEG1, ms.point_mass("1/2"), LEB, ms.abs_one_minus_zeta_fejer(), rank_one_dim2()])
@pytest.mark.parametrize("n", [0, 3, 8, 12])
def test_model_shift_is_two_isometric(mu, n):
    assert nx.opnorm(dr.mz_defect_form(mu, n, 2)) <= 1e-10


def test_mz_defect_order_one():
    assert not np.any(dr.mz_defect_form(ms.zero(), 4, 1))
    assert np.allclose(dr.mz_defect_form(LEB, 4, 1), np.eye(5))
    assert nx.lambda_min(dr.mz_defect_form(rank_one_dim2(), 5, 1)) >= -1e-10


def test_mz_defect_order_limit():
    with pytest.raises(ContractViolation):
        dr.mz_defect_form(LEB, 2, 4)


@pytest.mark.parametrize("mu", [LEB, NEG1, rank_one_dim2()])
def test_coefficient_shift_has_no_unitary_part(mu):
    t = dr.coefficient_shift(mu, 6)
    split = iso.wold_split(t)
    assert split.unitary_basis.shape[1] == 0
    assert split.analytic_basis.shape[1] == 7 * mu.dim


def test_lebesgue_compression_is_weighted_shift():
    t = dr.truncated_model_shift(LEB, 5)
    want = np.diag([math.sqrt((k + 2) / (k + 1)) for k in range(5)], -1)
    assert np.allclose(t, want, atol=1e-12)


def test_cayley_generator_of_lebesgue_truncations_not_uniformly_dissipative():
    ws = [sg.dissipativity_w(sg.cayley_generator(dr.truncated_model_shift(LEB, n))) for n in (2, 4, 8, 16, 32)]
    assert all(b > 1.8 * a for a, b in zip(ws, ws[1:]))


def test_structured_norm_matches_gram(rng):
    mu = rank_one_dim2() + ms.lebesgue(2)
    f = random_poly(rng, 9, 2)
    assert dr.norm_sq(mu, f) == pytest.approx(dr.norm_sq_dense(mu, f), rel=1e-12)
    fej = ms.abs_one_minus_zeta_fejer()
    g = random_poly(rng, 14)
    assert dr.norm_sq(fej, g) == pytest.approx(dr.norm_sq_dense(fej, g), rel=1e-12)


def test_local_dirichlet_examples():
    assert dr.local_dirichlet(P(4), 1j) == 0
    assert dr.local_dirichlet(P(0, 1), ms.unimodular(Fraction(2, 7))) == pytest.approx(1)
    assert dr.local_dirichlet(P(0, 0, 1), -1) == pytest.approx(2)


def test_local_dirichlet_requires_unit_circle():
    with pytest.raises(ContractViolation):
        dr.local_dirichlet(P(0, 1), 0.5)


def test_douglas_quotient_reconstructs(rng):
    f = random_poly(rng, 7)
    zeta = ms.unimodular(Fraction(3, 5))
    q = dr.douglas_quotient(f, zeta)
    for z in (0.3, -0.2 + 0.5j):
        assert np.allclose(q(z) * (z - zeta) + f(zeta), f(z), atol=1e-12)


@given(atomic_measures(), st.integers(0, 10), seeds())
def test_fubini_scalar(mu, deg, rng):
    assert dr.fubini_residual(mu, random_poly(rng, deg)) <= 1e-10


@given(atomic_measures(dim=2), st.integers(0, 10), seeds())
def test_fubini_operator_valued(mu, deg, rng):
    assert dr.fubini_residual(mu, random_poly(rng, deg, 2)) <= 1e-10


def test_fubini_examples():
    assert dr.fubini_residual(NEG1, P(0, 1)) == 0
    assert dr.dirichlet_energy(NEG1, P(0, 0, 1)) == pytest.approx(2)
    assert dr.fubini_residual(NEG1, P(0, 0, 1)) <= 1e-15


def test_phi_coeffs_examples():
    assert np.array_equal(dr.phi_coeffs(0, 5).coeffs, [1, 0, 0, 0, 0, 0])
    for t in (0.3, 1.0, 2.5):
        a = dr.phi_coeffs(t, 3).coeffs
        assert a[0] == pytest.approx(math.exp(-t))
        assert a[1] == pytest.approx(-2 * t * math.exp(-t))
        assert a[2] == pytest.approx(-2 * t * (1 - t) * math.exp(-t))


@pytest.mark.parametrize("t", [0.1, 1.0, 3.0])
def test_phi_coeffs_against_composition_oracle(t):
    a = dr.phi_coeffs(t, 50).coeffs
    b = dr.phi_coeffs_oracle(t, 50)
    for x, y in zip(a, b):
        assert abs(x - y) <= 1e-12 * abs(y) or (y == 0 and abs(x) <= 1e-15)


@given(st.floats(0, 5), st.integers(0, 400))
def test_phi_partial_h2_norms_at_most_one(t, m):
    a = dr.phi_coeffs(t, m).coeffs
    assert float(np.sum(a * a)) <= 1 + 1e-12


def test_phi_coeffs_match_values_inside_disc():
    t, z = 1.5, 0.4 - 0.3j
    a = dr.phi_coeffs(t, 200).coeffs
    assert np.polyval(a[::-1], z) == pytest.approx(dr.phi_value(t, z), abs=1e-13)


def test_local_dirichlet_phi_closed_form():
    assert dr.local_dirichlet_phi(3.0, -1) == pytest.approx(1.5)
    assert dr.local_dirichlet_phi(0.0, 1j) == 0
    assert dr.local_dirichlet_phi(2.0, 1j) == pytest.approx(2.0)
    with pytest.raises(PoleAtOne):
        dr.local_dirichlet_phi(1.0, 1)


@pytest.mark.parametrize("zeta", [-1, 1j, ms.unimodular(Fraction(1, 5))])
def test_phi_radial_quotient_converges_first_order(zeta):
    t = 1.3
    exact = dr.local_dirichlet_phi(t, zeta)
    for r, q in dr.phi_radial_quotients(t, zeta):
        assert abs(q - exact) <= 50 * (1 - r) * (1 + exact)


def test_multiplication_exact_examples():
    for t in (0.0, 0.5, 3.0):
        assert dr.phi_times_norm_exact(NEG1, P(1), t) == pytest.approx(1 + t / 2)
        assert dr.phi_times_norm_exact(NEG1, P(0, 1), t) == pytest.approx(2 + t / 2)
        assert dr.multiplication_rhs(NEG1, P(0, 1), t) == pytest.approx(2 + t / 2)


def test_multiplication_rejects_atom_at_one():
    with pytest.raises(PoleAtOne):
        dr.phi_times_norm_exact(ms.point_mass(0), P(1), 1.0)


@given(atomic_measures(dim=2).filter(lambda m: all(a.angle_over_pi != 0 for a in m.atoms)), seeds(), st.floats(0, 4))
def test_multiplication_exact_path_operator_valued(mu, rng, t):
    f = random_poly(rng, 3, 2)
    exact = dr.phi_times_norm_exact(mu, f, t)
    assert abs(exact - dr.multiplication_rhs(mu, f, t)) <= 1e-12 * (1 + abs(exact))


def test_truncated_phi_norm_approaches_exact_from_below():
    f = P(1, 1)
    exact = dr.phi_times_norm_exact(NEG1, f, 1.0)
    vals = [dr.norm_sq(NEG1, f.times_series(dr.phi_coeffs(1.0, m).coeffs)) for m in (64, 1024, 16384)]
    gaps = [exact - v for v in vals]
    assert all(g > 0 for g in gaps)
    assert gaps[0] > gaps[1] > gaps[2]


def test_estimate_w1_examples():
    assert dr.estimate_w1(ms.zero(), 3) == 0
    assert dr.estimate_w1(NEG1, 0) == pytest.approx(1 / 3)


def test_estimate_w2_examples():
    assert dr.estimate_w2(ms.zero(), 3) == 0
    assert dr.estimate_w2(NEG1, 0) == pytest.approx(0.25)
    assert isinstance(dr.estimate_w2(LEB, 2), ms.Diverges)


def test_estimates_nondecreasing_in_degree():
    for mu in (NEG1, rank_one_dim2(), ms.point_mass("1/2") + ms.point_mass("3/2", 0.5)):
        w1 = [dr.estimate_w1(mu, n) for n in range(0, 9)]
        w2 = [dr.estimate_w2(mu, n) for n in range(0, 9)]
        assert all(b >= a - 1e-12 for a, b in zip(w1, w1[1:]))
        assert all(b >= a - 1e-12 for a, b in zip(w2, w2[1:]))


def test_w1_below_w2_limit_for_point_mass():
    assert dr.estimate_w1(NEG1, 12) < dr.estimate_w2(NEG1, 12)


def test_kr_report_zero_measure_closed_form():
    rs = (0.5, 0.9, 0.99)
    rep = dr.kr_convergence_report(ms.zero(), P(1), rs)
    assert rep == pytest.approx([(1 - r) / (1 + r) for r in rs], rel=1e-10)


def test_kr_report_zero_polynomial():
    assert dr.kr_convergence_report(LEB, P(), (0.5, 0.9)) == [0.0, 0.0]


def test_kr_report_decreases_for_fejer_abs_density():
    rep = dr.kr_convergence_report(ms.abs_one_minus_zeta_fejer(), P(1))
    assert all(b < a for a, b in zip(rep, rep[1:]))


def test_kr_rejects_r_outside_unit_interval():
    with pytest.raises(ContractViolation):
        dr.kr_convergence_report(LEB, P(1), (1.0,))
