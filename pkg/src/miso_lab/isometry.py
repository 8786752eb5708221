"""Defect operators beta_m(T), m-isometries, m-concavity and Wold subspaces."""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from . import numerics as nx
from .errors import ClassError, ContractViolation

M_ISOMETRIC = "m-isometric"
M_CONCAVE = "m-concave"
NEITHER = "neither"


@dataclass(frozen=True)
class DefectForm:
    m: int
    matrix: np.ndarray


@dataclass(frozen=True)
class OperatorClass:
    verdict: str
    residual: float
    m: int = 1


@dataclass(frozen=True)
class WoldSplit:
    unitary_basis: np.ndarray
    analytic_basis: np.ndarray


def _square(t):
    t = nx.as_matrix(t)
    if t.shape[0] != t.shape[1]:
        raise ContractViolation(f"operator must be square, got {t.shape}")
    return t


def _gram_powers(t, kmax):
    """[T^{*j} T^j for j = 0..kmax]."""
    n = t.shape[0]
    out = []
    power = np.eye(n, dtype=complex)
    for _ in range(kmax + 1):
        out.append(nx.hermitian_part(power.conj().T @ power))
        power = t @ power
    return out


def beta(t, m: int) -> DefectForm:
    """beta_m(T) = sum_j (-1)^{m-j} C(m,j) T^{*j} T^j."""
    t = _square(t)
    if m < 0:
        raise ContractViolation("order m must be non-negative")
    grams = _gram_powers(t, m)
    out = np.zeros_like(grams[0])
    for j in range(m + 1):
        out = out + (-1) ** (m - j) * comb(m, j) * grams[j]
    return DefectForm(m, nx.hermitian_part(out))


def beta_recursion_residual(t, m: int) -> float:
    """Scaled residual of beta_{m+1} = T* beta_m T - beta_m."""
    t = _square(t)
    lhs = beta(t, m + 1).matrix
    bm = beta(t, m).matrix
    rhs = t.conj().T @ bm @ t - bm
    return nx.opnorm(lhs - rhs) / nx.scale(lhs, rhs)


def sum_of_defects_residual(t, k: int) -> float:
    """Scaled residual of T^{*k} T^k = sum_j C(k,j) beta_j(T)."""
    t = _square(t)
    power = np.linalg.matrix_power(t, k)
    lhs = power.conj().T @ power
    rhs = sum(comb(k, j) * beta(t, j).matrix for j in range(k + 1))
    return nx.opnorm(lhs - rhs) / nx.scale(lhs, rhs)


def classify(t, m: int, tol: float = 1e-10) -> OperatorClass:
    """m-isometric if ||beta_m|| <= tol, else m-concave if lambda_max(beta_m) <= tol.

    ``tol`` is relative to the scale of the summands T^{*j}T^j.
    """
    t = _square(t)
    if m < 1:
        raise ContractViolation("classification needs m >= 1")
    b = beta(t, m).matrix
    sc = nx.scale(*_gram_powers(t, m))
    norm = nx.opnorm(b) / sc
    if norm <= tol:
        return OperatorClass(M_ISOMETRIC, norm, m)
    top = nx.lambda_max(b) / sc
    if top <= tol:
        return OperatorClass(M_CONCAVE, top, m)
    return OperatorClass(NEITHER, top, m)


def discrete_growth_check(t, x, kmax: int, m: int, declared: str = M_ISOMETRIC, tol: float = 1e-10):
    """Per-k residuals of ||T^k x||^2 against sum_{j<m} C(k,j) <beta_j x, x>.

    For an m-isometry the residual is the absolute difference; for an
    m-concave operator it is the excess of the left side over the right
    (non-positive values mean the bound holds).  Both are divided by the
    scale ``1 + max_k ||T^k x||^2``.
    """
    t = _square(t)
    x = nx.as_vector(x)
    cls = classify(t, m, tol)
    if declared == M_ISOMETRIC and cls.verdict != M_ISOMETRIC:
        raise ClassError(f"operator is not {m}-isometric (residual {cls.residual:.3e})")
    if declared == M_CONCAVE and cls.verdict == NEITHER:
        raise ClassError(f"operator is not {m}-concave (lambda_max {cls.residual:.3e})")
    if declared not in (M_ISOMETRIC, M_CONCAVE):
        raise ContractViolation(f"unknown class {declared!r}")
    pairings = [float(np.real(np.vdot(x, beta(t, j).matrix @ x))) for j in range(m)]
    norms = []
    y = x.copy()
    for _ in range(kmax + 1):
        norms.append(float(np.real(np.vdot(y, y))))
        y = t @ y
    sc = 1.0 + max(norms)
    out = []
    for k, lhs in enumerate(norms):
        rhs = sum(comb(k, j) * pairings[j] for j in range(m))
        diff = lhs - rhs
        out.append((abs(diff) if declared == M_ISOMETRIC else diff) / sc)
    return out


def shifted_defect_residual(t, m: int, j: int) -> float:
    """Scaled residual of beta_{j+m} = sum_i (-1)^{j-i} C(j,i) T^{*i} beta_m T^i."""
    t = _square(t)
    if m < 1 or j < 0:
        raise ContractViolation("need m >= 1 and j >= 0")
    lhs = beta(t, j + m).matrix
    bm = beta(t, m).matrix
    rhs = np.zeros_like(bm)
    power = np.eye(t.shape[0], dtype=complex)
    for i in range(j + 1):
        rhs = rhs + (-1) ** (j - i) * comb(j, i) * (power.conj().T @ bm @ power)
        power = t @ power
    return nx.opnorm(lhs - rhs) / nx.scale(lhs, rhs)


def binom_sum_lhs(i: int, n: int, m: int) -> int:
    return sum((-1) ** (j - i) * comb(n + m, j + m) * comb(j, i) for j in range(i, n + 1))


def binom_sum_rhs(i: int, n: int, m: int) -> int:
    return comb(m - 1 + n - i, n - i)


def binom_sum_verify(i: int, n: int, m: int) -> bool:
    """Exact check of sum_{j=i}^{n} (-1)^{j-i} C(n+m, j+m) C(j, i) = C(m-1+n-i, n-i)."""
    if not (n >= i >= 0 and m >= 1):
        raise ContractViolation("need N >= i >= 0 and m >= 1")
    return binom_sum_lhs(i, n, m) == binom_sum_rhs(i, n, m)


def binom_sum_sweep(n_max: int = 30, m_max: int = 10):
    """All (i, N, m) in the sweep where the identity fails; empty when it holds."""
    return [
        (i, n, m)
        for m in range(1, m_max + 1)
        for n in range(n_max + 1)
        for i in range(n + 1)
        if not binom_sum_verify(i, n, m)
    ]


def wold_split(t, nmax: int | None = None, tol: float = 1e-10) -> WoldSplit:
    """Numerical Wold subspaces of T.

    The unitary part spans the intersection of the ranges of T^n for
    n <= nmax; the analytic part spans T^n E for E = H minus TH.
    """
    t = _square(t)
    dim = t.shape[0]
    if nmax is None:
        nmax = dim
    if nmax < dim:
        raise ContractViolation("nmax must be at least the dimension")
    basis = np.eye(dim, dtype=complex)
    for _ in range(nmax):
        nxt = nx.orth(t @ basis, tol)
        stable = nxt.shape[1] == basis.shape[1]
        basis = nxt
        if stable or basis.shape[1] == 0:
            break
    unitary = basis

    wandering = nx.null_space(t.conj().T, tol)
    blocks = []
    current = wandering
    for _ in range(nmax + 1):
        if current.shape[1] == 0:
            break
        blocks.append(current)
        current = t @ current
    if blocks:
        analytic = nx.orth(np.hstack(blocks), tol)
    else:
        analytic = np.zeros((dim, 0), dtype=complex)
    return WoldSplit(unitary, analytic)
