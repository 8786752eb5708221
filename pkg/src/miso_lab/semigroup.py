"""Finite-dimensional generators A, the forms alpha_m^A, and the Cayley bridge to cogenerators."""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np

from . import numerics as nx
from .errors import CayleyPole, ClassError, ContractViolation, DivergentIntegral, Singular
from .isometry import beta

# Orbit checks use this fixed mix of small and large times.
T_GRID = (0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 5.0)


@dataclass(frozen=True)
class GeneratorModel:
    A: np.ndarray

    @property
    def dim(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class AlphaForm:
    m: int
    matrix: np.ndarray


@dataclass(frozen=True)
class GrowthPolynomial:
    coefficients: tuple

    def __call__(self, t: float) -> float:
        return sum(c * t**j for j, c in enumerate(self.coefficients))


def _square(a):
    a = nx.as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ContractViolation(f"generator must be square, got {a.shape}")
    return a


def _alpha_terms(a, m):
    powers = [np.eye(a.shape[0], dtype=complex)]
    for _ in range(m):
        powers.append(a @ powers[-1])
    return [comb(m, j) * (powers[m - j].conj().T @ powers[j]) for j in range(m + 1)]


def alpha_form(a, m: int) -> AlphaForm:
    """Matrix of y -> sum_j C(m,j) <A^j y, A^{m-j} y>, i.e. sum_j C(m,j) (A^{m-j})* A^j."""
    a = _square(a)
    if m < 0:
        raise ContractViolation("order m must be non-negative")
    return AlphaForm(m, nx.hermitian_part(sum(_alpha_terms(a, m))))


def alpha_recursion_residual(a, m: int) -> float:
    """Scaled residual of alpha_{m+1} = A* alpha_m + alpha_m A."""
    a = _square(a)
    lhs = alpha_form(a, m + 1).matrix
    am = alpha_form(a, m).matrix
    rhs = a.conj().T @ am + am @ a
    return nx.opnorm(lhs - rhs) / nx.scale(lhs, rhs)


def is_m_skew_symmetric(a, m: int, tol: float = 1e-10):
    """(verdict, residual) with residual = ||alpha_m^A|| relative to the scale of its summands."""
    a = _square(a)
    if m < 1:
        raise ContractViolation("need m >= 1")
    residual = nx.opnorm(alpha_form(a, m).matrix) / nx.scale(*_alpha_terms(a, m))
    return residual <= tol, residual


def cayley_cogenerator(a) -> np.ndarray:
    """T = (A + I)(A - I)^{-1}."""
    a = _square(a)
    eye = np.eye(a.shape[0], dtype=complex)
    try:
        # (A+I)(A-I)^{-1} = ((A-I)^{-*} (A+I)^*)^*
        return nx.solve((a - eye).conj().T, (a + eye).conj().T).conj().T
    except Singular as exc:
        raise CayleyPole("A - I is not invertible") from exc


def cayley_generator(t) -> np.ndarray:
    """A = (T + I)(T - I)^{-1}."""
    t = _square(t)
    eye = np.eye(t.shape[0], dtype=complex)
    try:
        return nx.solve((t - eye).conj().T, (t + eye).conj().T).conj().T
    except Singular as exc:
        raise CayleyPole("T - I is not invertible") from exc


def beta_alpha_bridge_residual(a, m: int) -> float:
    """Scaled residual of beta_m(T) = 2^m (A-I)^{-*m} alpha_m (A-I)^{-m} with T the cogenerator."""
    a = _square(a)
    t = cayley_cogenerator(a)
    eye = np.eye(a.shape[0], dtype=complex)
    try:
        r = np.linalg.matrix_power(nx.inv(a - eye), m)
    except Singular as exc:
        raise CayleyPole("A - I is not invertible") from exc
    lhs = beta(t, m).matrix
    rhs = 2.0**m * (r.conj().T @ alpha_form(a, m).matrix @ r)
    return nx.opnorm(lhs - rhs) / nx.scale(lhs, rhs)


def _quad(form, x):
    return float(np.real(np.vdot(x, form @ x)))


def growth_polynomial(a, x, m: int, tol: float = 1e-10) -> GrowthPolynomial:
    """Coefficients alpha_j^A(x)/j!, j < m, of t -> ||e^{tA}x||^2 for m-skew-symmetric A."""
    a = _square(a)
    x = nx.as_vector(x)
    ok, residual = is_m_skew_symmetric(a, m, tol)
    if not ok:
        raise ClassError(f"generator is not {m}-skew-symmetric (residual {residual:.3e})")
    return GrowthPolynomial(
        tuple(_quad(alpha_form(a, j).matrix, x) / math.factorial(j) for j in range(m))
    )


def orbit_norm_sq(a, x, t: float) -> float:
    y = nx.mat_exp(a, t) @ nx.as_vector(x)
    return float(np.real(np.vdot(y, y)))


def growth_residuals(a, x, m: int, times=None):
    """|‖e^{tA}x‖² − p(t)| / ((1+t)^{m-1} ‖x‖²) on the time grid."""
    a = _square(a)
    x = nx.as_vector(x)
    poly = growth_polynomial(a, x, m)
    times = np.linspace(0.0, 5.0, 20) if times is None else times
    norm = max(float(np.real(np.vdot(x, x))), 1e-300)
    return [abs(orbit_norm_sq(a, x, t) - poly(t)) / ((1 + t) ** (m - 1) * norm) for t in times]


def dissipativity_w(a) -> float:
    """Least w with Re<Ay,y> <= w||y||^2, i.e. lambda_max of the Hermitian part."""
    return nx.lambda_max(nx.hermitian_part(_square(a)))


def quasicontractivity_excess(a, times=None) -> float:
    """max_t ||e^{tA}|| / e^{wt} - 1 over the grid; non-positive when the bound holds."""
    a = _square(a)
    w = dissipativity_w(a)
    times = np.linspace(0.0, 4.0, 17) if times is None else times
    return max(nx.opnorm(nx.mat_exp(a, t)) / math.exp(w * t) - 1.0 for t in times)


def _simpson_weights(n):
    if n % 2:
        raise ContractViolation("Simpson's rule needs an even number of steps")
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / 3.0


def resolvent_quadrature(a, lam: float, horizon: float | None = None, steps: int | None = None) -> np.ndarray:
    """Composite Simpson approximation of int_0^horizon e^{tA} e^{-lam t} dt."""
    a = _square(a)
    w = dissipativity_w(a)
    if lam <= w:
        raise DivergentIntegral(f"lambda={lam} does not exceed the dissipativity bound w={w}")
    if horizon is None:
        horizon = math.log(1e10) / (lam - w) + 1.0
    if steps is None:
        per_unit = max(64, int(math.ceil(32 * (nx.opnorm(a) + lam))))
        steps = int(math.ceil(per_unit * horizon))
        steps += steps % 2
    h = horizon / steps
    eye = np.eye(a.shape[0], dtype=complex)
    step = nx.mat_exp(a - lam * eye, h)
    weights = _simpson_weights(steps)
    total = np.zeros_like(eye)
    current = eye.copy()
    for k in range(steps + 1):
        total += weights[k] * current
        current = current @ step
    return h * total


def resolvent_residual(a, lam: float, **kwargs) -> float:
    """||quadrature - (lam - A)^{-1}|| / ||(lam - A)^{-1}||."""
    a = _square(a)
    exact = nx.inv(lam * np.eye(a.shape[0]) - a)
    approx = resolvent_quadrature(a, lam, **kwargs)
    return nx.opnorm(approx - exact) / nx.opnorm(exact)


def difference_quotient_sides(a, y, m: int, h: float, nodes: int = 64):
    """Both sides of the m-th difference identity for f(t) = ||e^{tA}y||^2.

    Left: sum_k (-1)^{m-k} C(m,k) f(kh).  Right: tensor-product Simpson
    quadrature of alpha_m^A(e^{sA}y) at s = s_1 + ... + s_m over [0,h]^m.
    """
    a = _square(a)
    y = nx.as_vector(y)
    if not (0 < h <= 1):
        raise ContractViolation("need 0 < h <= 1")
    if m < 0 or m > 4:
        raise ContractViolation("m must lie in 0..4")
    lhs = sum((-1) ** (m - k) * comb(m, k) * orbit_norm_sq(a, y, k * h) for k in range(m + 1))
    if m == 0:
        return lhs, orbit_norm_sq(a, y, 0.0)
    nodes += nodes % 2
    dh = h / nodes
    w1 = _simpson_weights(nodes) * dh
    # The integrand depends on the sum of the m coordinates only, so the
    # tensor-product weights collapse to an m-fold convolution.
    wsum = w1
    for _ in range(m - 1):
        wsum = np.convolve(wsum, w1)
    form = alpha_form(a, m).matrix
    step = nx.mat_exp(a, dh)
    z = y.copy()
    rhs = 0.0
    for idx in range(wsum.size):
        rhs += wsum[idx] * _quad(form, z)
        z = step @ z
    return lhs, rhs


def difference_quotient_check(a, y, m: int, h: float, nodes: int = 64) -> float:
    """Relative disagreement of the two sides, |L - R| / max(1, |L|, |R|)."""
    lhs, rhs = difference_quotient_sides(a, y, m, h, nodes)
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))


def concave_growth_check(a, x, m: int, times=T_GRID, tol: float = 1e-10) -> float:
    """Largest scaled excess of ||e^{tA}x||^2 over sum_{j<m} t^j/j! alpha_j(x) on the grid.

    Raises :class:`ClassError` unless lambda_max(alpha_m^A) <= tol.
    """
    a = _square(a)
    x = nx.as_vector(x)
    top = nx.lambda_max(alpha_form(a, m).matrix) / nx.scale(*_alpha_terms(a, m))
    if top > tol:
        raise ClassError(f"generator is not {m}-concave (lambda_max {top:.3e})")
    coeffs = [_quad(alpha_form(a, j).matrix, x) / math.factorial(j) for j in range(m)]
    sc = 1.0 + float(np.real(np.vdot(x, x)))
    excess = []
    for t in times:
        bound = sum(c * t**j for j, c in enumerate(coeffs))
        excess.append((orbit_norm_sq(a, x, t) - bound) / sc)
    return max(excess)
