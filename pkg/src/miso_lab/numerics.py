"""Dense complex linear algebra used throughout the package.

Matrices are plain complex ``numpy`` arrays.  Tolerances are relative to
``scale(...) = 1 + max |entry|`` unless a function says otherwise.
"""
from __future__ import annotations

import math
import warnings

import numpy as np
import scipy.linalg

from .errors import ContractViolation, Singular, SingularGram

HERMITIAN_RTOL = 1e-12

# Taylor degree for the scaled argument; with ||X|| <= 1/2 the remainder is < 1e-22.
_EXP_TAYLOR_DEGREE = 18
_EXP_SCALED_NORM = 0.5


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise ContractViolation(f"expected a matrix, got array of shape {m.shape}")
    return m


def as_vector(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=complex)).ravel()


def scale(*arrays) -> float:
    """1 + the largest entry magnitude over all arguments."""
    top = 0.0
    for a in arrays:
        a = np.asarray(a)
        if a.size:
            top = max(top, float(np.max(np.abs(a))))
    return 1.0 + top


def opnorm(a) -> float:
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def hermitian_defect(h) -> float:
    h = np.asarray(h)
    if h.size == 0:
        return 0.0
    return float(np.max(np.abs(h - h.conj().T)))


def is_hermitian(h, rtol: float = HERMITIAN_RTOL) -> bool:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        return False
    return hermitian_defect(h) <= rtol * scale(h)


def hermitian_part(h) -> np.ndarray:
    h = as_matrix(h)
    return (h + h.conj().T) / 2


def _require_square(a, name="matrix"):
    if a.shape[0] != a.shape[1]:
        raise ContractViolation(f"{name} must be square, got shape {a.shape}")


def _require_hermitian(h, name="matrix"):
    _require_square(h, name)
    if not is_hermitian(h):
        raise ContractViolation(
            f"{name} is not Hermitian (defect {hermitian_defect(h):.3e}, scale {scale(h):.3e})"
        )


def herm_eig(h):
    """Eigen-decomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with real eigenvalues in
    ascending order and orthonormal eigenvectors as columns.
    """
    h = as_matrix(h)
    _require_hermitian(h)
    w, v = np.linalg.eigh(hermitian_part(h))
    return w, v


def eigvalsh(h) -> np.ndarray:
    h = as_matrix(h)
    _require_hermitian(h)
    return np.linalg.eigvalsh(hermitian_part(h))


def lambda_max(h) -> float:
    w = eigvalsh(h)
    return float(w[-1]) if w.size else 0.0


def lambda_min(h) -> float:
    w = eigvalsh(h)
    return float(w[0]) if w.size else 0.0


def _check_gram(g):
    w = np.linalg.eigvalsh(hermitian_part(g))
    if w.size == 0:
        raise ContractViolation("empty Gram matrix")
    if w[0] <= 1e-12 * max(abs(w[-1]), 1e-300):
        raise SingularGram(w[0])


def gen_eig_max(q, g) -> float:
    """Largest value of <Qx,x>/<Gx,x> over nonzero x, with G positive definite."""
    q = as_matrix(q)
    g = as_matrix(g)
    _require_hermitian(q, "Q")
    _require_hermitian(g, "G")
    if q.shape != g.shape:
        raise ContractViolation(f"shape mismatch {q.shape} vs {g.shape}")
    _check_gram(g)
    w = scipy.linalg.eigh(hermitian_part(q), hermitian_part(g), eigvals_only=True)
    return float(w[-1])


def gen_eig_max_whitened(q, g) -> float:
    """Same quantity as :func:`gen_eig_max`, via G = LL* and herm_eig of L^-1 Q L^-*."""
    q = as_matrix(q)
    g = as_matrix(g)
    _require_hermitian(q, "Q")
    _require_hermitian(g, "G")
    _check_gram(g)
    lower = np.linalg.cholesky(hermitian_part(g))
    x = scipy.linalg.solve_triangular(lower, hermitian_part(q), lower=True)
    m = scipy.linalg.solve_triangular(lower, x.conj().T, lower=True)
    w, _ = herm_eig(hermitian_part(m))
    return float(w[-1])


def _taylor_exp(x, degree):
    n = x.shape[0]
    out = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, degree + 1):
        term = term @ x / k
        out = out + term
    return out


def mat_exp(a, t: float = 1.0) -> np.ndarray:
    """e^{tA} by scaling and squaring around a fixed-degree Taylor polynomial."""
    a = as_matrix(a)
    _require_square(a)
    x = t * a
    norm = float(np.linalg.norm(x, 1)) if x.size else 0.0
    squarings = 0
    if norm > _EXP_SCALED_NORM:
        squarings = int(math.ceil(math.log2(norm / _EXP_SCALED_NORM)))
    out = _taylor_exp(x / 2.0**squarings, _EXP_TAYLOR_DEGREE)
    for _ in range(squarings):
        out = out @ out
    return out


def taylor_series_exp(a, t: float = 1.0, terms: int = 60) -> np.ndarray:
    """Unscaled Taylor series of e^{tA}; only accurate for small ||tA||."""
    a = as_matrix(a)
    _require_square(a)
    return _taylor_exp(t * a, terms)


def solve(a, b) -> np.ndarray:
    """Solve AX = B, raising :class:`Singular` on a tiny LU pivot."""
    a = as_matrix(a)
    _require_square(a)
    b_arr = np.asarray(b, dtype=complex)
    if b_arr.shape[0] != a.shape[0]:
        raise ContractViolation(f"shape mismatch {a.shape} vs {b_arr.shape}")
    if a.size == 0:
        return b_arr.copy()
    with warnings.catch_warnings():
        # exact zero pivots are reported below as Singular
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a)
    pivots = np.abs(np.diag(lu))
    if pivots.min() < 1e-13 * opnorm(a) or pivots.min() == 0.0:
        raise Singular(f"matrix is singular to working precision (smallest pivot {pivots.min():.3e})")
    return scipy.linalg.lu_solve((lu, piv), b_arr)


def inv(a) -> np.ndarray:
    a = as_matrix(a)
    return solve(a, np.eye(a.shape[0], dtype=complex))


def orth(a, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of the column span, dropping singular values below tol * largest."""
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    rank = int(np.sum(s > tol * s[0]))
    return u[:, :rank]


def null_space(a, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of the kernel, using the same relative rank threshold as :func:`orth`."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[1]
    if a.size == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(a)
    largest = s[0] if s.size else 0.0
    if largest == 0.0:
        return np.eye(n, dtype=complex)
    rank = int(np.sum(s > tol * largest))
    return vh[rank:].conj().T
