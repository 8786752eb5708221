"""Seeded matrix families used by the sweeps and the tests."""
from __future__ import annotations

import numpy as np


def random_matrix(rng, n, scale=1.0):
    return scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2 * n)


def random_hermitian(rng, n):
    a = random_matrix(rng, n)
    return (a + a.conj().T) / 2


def random_unitary(rng, n):
    q, r = np.linalg.qr(random_matrix(rng, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def skew_adjoint(rng, n):
    """iH: generates a unitary group, so every alpha_m with m >= 1 vanishes."""
    return 1j * random_hermitian(rng, n)


def nilpotent_witness():
    return np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


def three_skew(rng, n):
    """U (J ⊕ iH) U* with J the 2x2 nilpotent block: 3-skew-symmetric, not 2-skew-symmetric."""
    if n < 2:
        raise ValueError("need n >= 2")
    a = np.zeros((n, n), dtype=complex)
    a[:2, :2] = nilpotent_witness()
    if n > 2:
        a[2:, 2:] = skew_adjoint(rng, n - 2)
    u = random_unitary(rng, n)
    return u @ a @ u.conj().T


def random_dissipative(rng, n):
    """K - P with K skew-adjoint and P positive semidefinite."""
    b = random_matrix(rng, n)
    return skew_adjoint(rng, n) - b @ b.conj().T


def concave_example():
    """alpha_3 of this generator is negative definite."""
    return np.array([[-0.5, 0.5], [0.0, -0.5]], dtype=complex)


def random_vector(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)
