"""Truncated harmonically weighted Dirichlet spaces over an operator-valued measure.

Coefficient vectors stack the Maclaurin coefficients block by block,
``c = (f^(0), f^(1), ..., f^(N))``, and every Hermitian form here is a
matrix ``H`` with ``<Hf, f> = c^* H c``.  In that layout the Gram block in
row k, column l is ``delta_kl I + min(k, l) muhat(k - l)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from . import measures as ms
from . import numerics as nx
from .errors import ContractViolation, PoleAtOne

UNIMODULAR_TOL = 1e-12
PHI_DEGREE_CAP = 1 << 16


@dataclass(frozen=True)
class VecPoly:
    """E-valued polynomial; ``coeffs[k]`` is the coefficient of z^k."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim == 1:
            c = c.reshape(-1, 1)
        if c.ndim != 2:
            raise ContractViolation(f"coefficients must be a list of vectors, got shape {c.shape}")
        nonzero = np.flatnonzero(np.any(c != 0, axis=1))
        c = c[: nonzero[-1] + 1] if nonzero.size else c[:0]
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def scalar(cls, *coeffs):
        return cls(np.asarray(coeffs, dtype=complex).reshape(-1, 1))

    @classmethod
    def monomial(cls, k: int, x=(1.0,)):
        x = nx.as_vector(x)
        c = np.zeros((k + 1, x.size), dtype=complex)
        c[k] = x
        return cls(c)

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def __call__(self, z: complex) -> np.ndarray:
        out = np.zeros(self.dim, dtype=complex)
        for c in self.coeffs[::-1]:
            out = out * z + c
        return out

    def padded(self, n: int) -> np.ndarray:
        """Stacked coefficient vector of length (n+1)*dim."""
        if self.degree > n:
            raise ContractViolation(f"degree {self.degree} exceeds truncation {n}")
        out = np.zeros((n + 1, self.dim), dtype=complex)
        out[: self.degree + 1] = self.coeffs
        return out.ravel()

    def times_series(self, a) -> "VecPoly":
        """Product with the scalar polynomial sum_k a_k z^k."""
        a = np.asarray(a, dtype=complex)
        if self.degree < 0 or a.size == 0:
            return VecPoly(np.zeros((0, self.dim)))
        cols = [np.convolve(a, self.coeffs[:, i]) for i in range(self.dim)]
        return VecPoly(np.stack(cols, axis=1))

    def h2_norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))


def _poly(f, dim=None) -> VecPoly:
    if isinstance(f, VecPoly):
        p = f
    else:
        p = VecPoly(f)
    if dim is not None and p.dim != dim and p.degree >= 0:
        raise ContractViolation(f"polynomial has values in dimension {p.dim}, measure in {dim}")
    if dim is not None and p.degree < 0 and p.dim != dim:
        p = VecPoly(np.zeros((0, dim)))
    return p


# ----------------------------------------------------------------- Gram forms


@dataclass(frozen=True)
class GramTruncation:
    N: int
    mu: ms.OperatorMeasure
    G: np.ndarray


def _toeplitz_blocks(mu, n):
    """Dense block matrix with block (k, l) = muhat(k - l), 0 <= k, l <= n."""
    d = mu.dim
    table = {k: ms.fourier(mu, k) for k in range(-n, n + 1)}
    out = np.zeros(((n + 1) * d, (n + 1) * d), dtype=complex)
    for k in range(n + 1):
        for l in range(n + 1):
            out[k * d:(k + 1) * d, l * d:(l + 1) * d] = table[k - l]
    return out


def _min_weights(n, d):
    idx = np.arange(n + 1)
    return np.kron(np.minimum.outer(idx, idx), np.ones((d, d)))


def gram(mu: ms.OperatorMeasure, N: int) -> GramTruncation:
    """Gram matrix of the monomials z^k x, 0 <= k <= N."""
    if N < 0:
        raise ContractViolation("degree bound must be non-negative")
    d = mu.dim
    g = np.eye((N + 1) * d, dtype=complex) + _min_weights(N, d) * _toeplitz_blocks(mu, N)
    return GramTruncation(N, mu, nx.hermitian_part(g))


def boundary_matrix(mu: ms.OperatorMeasure, N: int) -> np.ndarray:
    """Matrix of f -> (1/2pi) int <dmu f, f> on degree <= N."""
    return nx.hermitian_part(_toeplitz_blocks(mu, N))


def _form(h, c, b=None):
    b = c if b is None else b
    return complex(np.vdot(b, h @ c))


def norm_sq_dense(mu, f) -> float:
    f = _poly(f, mu.dim)
    n = max(f.degree, 0)
    return _form(gram(mu, n).G, f.padded(n)).real


def dirichlet_energy(mu: ms.OperatorMeasure, f) -> float:
    """Series value of D_mu(f) = sum_{k,l>=1} min(k,l) <muhat(l-k) f^(k), f^(l)>."""
    f = _poly(f, mu.dim)
    if f.degree < 1:
        return 0.0
    n = f.degree
    h = _min_weights(n, mu.dim) * _toeplitz_blocks(mu, n)
    return _form(h, f.padded(n)).real


def boundary_form(mu: ms.OperatorMeasure, f, g) -> complex:
    """(1/2pi) int <dmu f, g> = sum_{k,l} <muhat(l-k) f^(k), g^(l)>."""
    f = _poly(f, mu.dim)
    g = _poly(g, mu.dim)
    n = max(f.degree, g.degree, 0)
    return _form(_toeplitz_blocks(mu, n), f.padded(n), g.padded(n))


def dirichlet_energy_structured(mu: ms.OperatorMeasure, f) -> float:
    """D_mu(f) without forming the Gram matrix; linear in deg f for fixed density degree.

    Atoms use min(k,l) = #{n >= 1 : n <= k, n <= l}, which turns the double
    sum into (1/2pi) sum_n <W U_n, U_n> with U_n = sum_{k>=n} zeta^k f^(k).
    The density is summed along each of its finitely many diagonals.
    """
    f = _poly(f, mu.dim)
    if f.degree < 1:
        return 0.0
    c = f.coeffs
    k = np.arange(c.shape[0])
    total = 0.0
    for a in mu.atoms:
        rotated = (a.zeta ** k)[:, None] * c
        tails = np.cumsum(rotated[::-1], axis=0)[::-1][1:]
        total += float(np.real(np.einsum("ni,ij,nj->", tails.conj(), a.weight, tails))) / ms.TWO_PI
    for d, coef in mu.density.items():
        if abs(d) > f.degree:
            continue
        # pairs (row k, column l) with k - l = d
        lo = max(0, -d)
        cols = np.arange(lo, c.shape[0] - max(d, 0))
        rows = cols + d
        w = np.minimum(rows, cols)
        total += float(np.real(np.einsum("n,ni,ij,nj->", w, c[rows].conj(), coef, c[cols])))
    return total


def norm_sq(mu: ms.OperatorMeasure, f) -> float:
    """||f||^2 in D^2_mu(E), evaluated along diagonals (no dense Gram)."""
    f = _poly(f, mu.dim)
    return f.h2_norm_sq() + dirichlet_energy_structured(mu, f)


def _shift_matrix(n, d, j, top=None):
    """Coefficient map of multiplication by z^j from degree <= n into degree <= top (default n + j)."""
    top = n + j if top is None else top
    s = np.zeros(((top + 1) * d, (n + 1) * d))
    keep = min(n + 1, top + 1 - j) * d  # coefficients pushed past ``top`` are dropped
    s[j * d:j * d + keep, :keep] = np.eye(keep)
    return s


def defect_formula_residual(mu: ms.OperatorMeasure, f) -> float:
    """|(||zf||^2 - ||f||^2) - (1/2pi) int <dmu f, f>| divided by 1 + max|side|."""
    f = _poly(f, mu.dim)
    n = max(f.degree, 0)
    g = gram(mu, n + 1).G
    c = _shift_matrix(n, mu.dim, 0, n + 1) @ f.padded(n)
    zc = _shift_matrix(n, mu.dim, 1) @ f.padded(n)
    lhs = _form(g, zc).real - _form(g, c).real
    rhs = boundary_form(mu, f, f).real
    return abs(lhs - rhs) / (1.0 + max(abs(lhs), abs(rhs)))


def mz_defect_form(mu: ms.OperatorMeasure, N: int, m: int) -> np.ndarray:
    """Matrix of f -> <beta_m(M_z) f, f> on polynomials of degree <= N."""
    if not 0 <= m <= 3:
        raise ContractViolation("order m must lie in 0..3")
    if N < 0:
        raise ContractViolation("degree bound must be non-negative")
    g = gram(mu, N + m).G
    out = np.zeros(((N + 1) * mu.dim,) * 2, dtype=complex)
    for j in range(m + 1):
        s = _shift_matrix(N, mu.dim, j, N + m)
        out += (-1) ** (m - j) * comb(m, j) * (s.T @ g @ s)
    return nx.hermitian_part(out)


def coefficient_shift(mu: ms.OperatorMeasure, N: int) -> np.ndarray:
    """(f^(0), ..., f^(N)) -> (0, f^(0), ..., f^(N-1)): M_z with the top coefficient dropped."""
    return _shift_matrix(N, mu.dim, 1, N)


def truncated_model_shift(mu: ms.OperatorMeasure, N: int) -> np.ndarray:
    """Compression of M_z to degree <= N, in an orthonormal basis of that subspace."""
    d = mu.dim
    g_n = gram(mu, N).G
    g_next = gram(mu, N + 1).G
    embed = _shift_matrix(N, d, 0, N + 1)
    shifted = _shift_matrix(N, d, 1)
    coeff_map = nx.solve(g_n, embed.T @ g_next @ shifted)
    upper = np.linalg.cholesky(g_n).conj().T
    return upper @ coeff_map @ nx.inv(upper)


# ------------------------------------------------------- local Dirichlet integrals


def _check_unimodular(zeta):
    zeta = complex(zeta)
    if abs(abs(zeta) - 1.0) > UNIMODULAR_TOL:
        raise ContractViolation(f"|zeta| = {abs(zeta)} is not 1")
    return zeta


def douglas_quotient(f, zeta) -> VecPoly:
    """F = (f - f(zeta)) / (z - zeta) by synthetic division."""
    f = _poly(f)
    zeta = _check_unimodular(zeta)
    if f.degree < 1:
        return VecPoly(np.zeros((0, f.dim)))
    a = f.coeffs
    n = f.degree
    b = np.zeros((n, f.dim), dtype=complex)
    b[n - 1] = a[n]
    for j in range(n - 1, 0, -1):
        b[j - 1] = a[j] + zeta * b[j]
    return VecPoly(b)


def local_dirichlet(f, zeta, weight=None) -> float:
    """D_zeta(f) = ||(f - f(zeta))/(z - zeta)||^2_{H^2}; with ``weight`` W, sum_k <W F^(k), F^(k)>."""
    f = _poly(f)
    q = douglas_quotient(f, zeta).coeffs
    if weight is None:
        if f.dim != 1:
            raise ContractViolation("vector-valued f needs a weight")
        return float(np.sum(np.abs(q) ** 2))
    w = nx.as_matrix(weight)
    return float(np.real(np.einsum("ki,ij,kj->", q.conj(), w, q)))


def fubini_residual(mu: ms.OperatorMeasure, f) -> float:
    """Series D_mu(f) against (1/2pi) sum_j D^{W_j}_{zeta_j}(f); needs an atomic measure."""
    if not mu.is_atomic:
        raise ContractViolation("the Douglas path needs a purely atomic measure")
    f = _poly(f, mu.dim)
    series = dirichlet_energy(mu, f)
    douglas = sum(local_dirichlet(f, a.zeta, a.weight) for a in mu.atoms) / ms.TWO_PI
    return abs(series - douglas) / (1.0 + max(abs(series), abs(douglas)))


# ------------------------------------------------------------------ phi_t


@dataclass(frozen=True)
class PhiCoefficients:
    t: float
    coeffs: np.ndarray


@lru_cache(maxsize=64)
def _phi_coeffs_cached(t, m):
    a = np.zeros(m + 1)
    a[0] = math.exp(-t)
    if m >= 1:
        a[1] = -2.0 * t * a[0]
    for n in range(1, m):
        a[n + 1] = ((2 * n - 2 * t) * a[n] - (n - 1) * a[n - 1]) / (n + 1)
    a.setflags(write=False)
    return a


def phi_coeffs(t: float, M: int) -> PhiCoefficients:
    """Maclaurin coefficients a_0..a_M of exp(t(z+1)/(z-1)) from (z-1)^2 phi' = -2t phi."""
    if t < 0 or M < 0:
        raise ContractViolation("need t >= 0 and M >= 0")
    return PhiCoefficients(float(t), _phi_coeffs_cached(float(t), int(M)))


def phi_coeffs_oracle(t: float, M: int) -> np.ndarray:
    """e^{-t} exp(-2t(z + ... + z^M)) truncated at degree M, via n b_n = sum_k k g_k b_{n-k}."""
    b = np.zeros(M + 1)
    b[0] = 1.0
    for n in range(1, M + 1):
        k = np.arange(1, n + 1)
        b[n] = float(np.sum(k * (-2.0 * t) * b[n - k])) / n
    return math.exp(-t) * b


def phi_value(t: float, z: complex) -> complex:
    return complex(np.exp(t * (z + 1) / (z - 1)))


def local_dirichlet_phi(t: float, zeta) -> float:
    """D_zeta(phi_t) = 2t / |1 - zeta|^2."""
    zeta = _check_unimodular(zeta)
    if abs(1 - zeta) < 1e-14:
        raise PoleAtOne("phi_t has its singularity at zeta = 1")
    return 2.0 * t / abs(1 - zeta) ** 2


def phi_radial_quotients(t: float, zeta, exponents=(3, 4, 5, 6)):
    """[(r, (1 - |phi_t(r zeta)|^2) / (1 - r^2))] at r = 1 - 10^{-k}."""
    zeta = _check_unimodular(zeta)
    if abs(1 - zeta) < 1e-14:
        raise PoleAtOne("phi_t has its singularity at zeta = 1")
    out = []
    for k in exponents:
        r = 1.0 - 10.0 ** (-k)
        # 1 - |phi|^2 = -expm1(2 Re(t (rz+1)/(rz-1))) avoids cancellation
        w = t * (r * zeta + 1) / (r * zeta - 1)
        out.append((r, -math.expm1(2.0 * w.real) / (1 - r * r)))
    return out


# ------------------------------------------------------- multiplication formula


@dataclass(frozen=True)
class MultiplicationCheck:
    exact: float
    truncated: float
    rhs: float
    degree: int
    converged: bool

    @property
    def exact_residual(self) -> float:
        return abs(self.exact - self.rhs)

    @property
    def truncated_residual(self) -> float:
        return abs(self.truncated - self.rhs)


def _require_atomic_off_one(mu):
    if not mu.is_atomic:
        raise ContractViolation("the multiplication formula check needs a purely atomic measure")
    for a in mu.atoms:
        if a.angle_over_pi == 0:
            raise PoleAtOne("atom at zeta = 1")


def phi_times_norm_exact(mu: ms.OperatorMeasure, f, t: float) -> float:
    """||phi_t f||^2 per atom: H^2 norm is unchanged, D_zeta(phi f) = D_zeta(f) + <W f(zeta), f(zeta)> D_zeta(phi)."""
    _require_atomic_off_one(mu)
    f = _poly(f, mu.dim)
    total = f.h2_norm_sq()
    for a in mu.atoms:
        v = f(a.zeta)
        point = float(np.real(np.vdot(v, a.weight @ v)))
        total += (local_dirichlet(f, a.zeta, a.weight) + point * local_dirichlet_phi(t, a.zeta)) / ms.TWO_PI
    return total


def multiplication_rhs(mu: ms.OperatorMeasure, f, t: float) -> float:
    """||f||^2 + (t/pi) sum_j <W_j f(zeta_j), f(zeta_j)> / |1 - zeta_j|^2."""
    _require_atomic_off_one(mu)
    f = _poly(f, mu.dim)
    total = norm_sq_dense(mu, f)
    for a in mu.atoms:
        v = f(a.zeta)
        total += t / math.pi * float(np.real(np.vdot(v, a.weight @ v))) / abs(1 - a.zeta) ** 2
    return total


def phi_times_norm_truncated(mu, f, t, M=16, increment_tol=1e-8, cap=PHI_DEGREE_CAP):
    """||phi_t^{(M)} f||^2 with M doubled until the change drops below ``increment_tol``.

    Returns ``(value, M, converged)``; stops at ``cap`` without convergence.
    """
    f = _poly(f, mu.dim)
    M = max(int(M), 1)
    prev = norm_sq(mu, f.times_series(phi_coeffs(t, M).coeffs))
    while M < cap:
        M *= 2
        cur = norm_sq(mu, f.times_series(phi_coeffs(t, M).coeffs))
        if abs(cur - prev) < increment_tol:
            return cur, M, True
        prev = cur
    return prev, M, False


def multiplication_formula_check(mu, f, t, M=16, cap=PHI_DEGREE_CAP) -> MultiplicationCheck:
    _require_atomic_off_one(mu)
    exact = phi_times_norm_exact(mu, f, t)
    rhs = multiplication_rhs(mu, f, t)
    truncated, degree, converged = phi_times_norm_truncated(mu, f, t, M, cap=cap)
    return MultiplicationCheck(exact, truncated, rhs, degree, converged)


def multiplication_formula_residual(mu, f, t, M=16, cap=PHI_DEGREE_CAP):
    """(exact-path residual, truncated-path residual) against the closed right-hand side."""
    chk = multiplication_formula_check(mu, f, t, M, cap)
    return chk.exact_residual, chk.truncated_residual


# ------------------------------------------------------------------ w estimates


def _one_minus_z_matrix(n, d):
    """Coefficient map f -> (1 - z) f from degree <= n into degree <= n + 1."""
    return _shift_matrix(n, d, 0, n + 1) - _shift_matrix(n, d, 1)


def estimate_w1(mu: ms.OperatorMeasure, N: int) -> float:
    """sup over degree <= N of (1/2pi) int <dmu f, f> / ||(1 - z) f||^2."""
    q = boundary_matrix(mu, N)
    d = _one_minus_z_matrix(N, mu.dim)
    g = nx.hermitian_part(d.T @ gram(mu, N + 1).G @ d)
    return nx.gen_eig_max(q, g)


def estimate_w2(mu: ms.OperatorMeasure, N: int, quad_points: int = 512):
    """sup over degree <= N of (1/2pi) int <dmu~ f, f> / ||f||^2, or Diverges."""
    tilde = ms.tilde_measure(mu, quad_points)
    if isinstance(tilde, ms.Diverges):
        return tilde
    return nx.gen_eig_max(boundary_matrix(tilde, N), gram(mu, N).G)


def kr_truncation(r: float, tol: float = 1e-12) -> int:
    return max(1, int(math.ceil(math.log(tol) / math.log(r))))


def kr_coeffs(r: float, M: int) -> np.ndarray:
    """(1 - z)/(1 - rz) = 1 + sum_{n>=1} (r - 1) r^{n-1} z^n, truncated at degree M."""
    c = np.empty(M + 1)
    c[0] = 1.0
    c[1:] = (r - 1.0) * r ** np.arange(M)
    return c


def kr_convergence_report(mu: ms.OperatorMeasure, f, r_grid=(0.5, 0.7, 0.8, 0.9, 0.95, 0.99)):
    """||f - k_r f||^2 in D^2_mu for each r."""
    f = _poly(f, mu.dim)
    out = []
    for r in r_grid:
        if not 0 < r < 1:
            raise ContractViolation(f"r = {r} is not in (0, 1)")
        one_minus_k = -kr_coeffs(r, kr_truncation(r))
        one_minus_k[0] += 1.0
        out.append(norm_sq(mu, f.times_series(one_minus_k)))
    return out
