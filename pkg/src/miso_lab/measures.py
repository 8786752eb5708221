"""PSD-matrix-valued measures on the unit circle with finitely many Fourier data.

A measure is a finite sum of atoms plus a density w.r.t. arc length given
as a trigonometric matrix polynomial ``D(zeta) = sum_n D(n) zeta^n``.
An atom ``(zeta, W)`` carries the raw mass ``W``, so it contributes
``W conj(zeta)^n / (2 pi)`` to the Fourier coefficient of order n, while the
density contributes ``D(n)`` exactly.  Arc length therefore has
``muhat(0) = I`` and total mass ``2 pi I``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import numerics as nx
from .errors import BoundaryEvaluation, ContractViolation

TWO_PI = 2.0 * math.pi
PSD_GRID = 512


def as_angle(angle_over_pi) -> Fraction:
    """Rational angle (in units of pi) reduced to [0, 2)."""
    if isinstance(angle_over_pi, str):
        a = Fraction(angle_over_pi)
    elif isinstance(angle_over_pi, Fraction):
        a = angle_over_pi
    elif isinstance(angle_over_pi, int):
        a = Fraction(angle_over_pi)
    else:
        a = Fraction(float(angle_over_pi)).limit_denominator(10**9)
    return a % 2


_EXACT_POINTS = {
    Fraction(0): 1 + 0j,
    Fraction(1, 2): 1j,
    Fraction(1): -1 + 0j,
    Fraction(3, 2): -1j,
}


def unimodular(angle_over_pi) -> complex:
    """e^{i pi a}, exact at the four quarter turns."""
    a = as_angle(angle_over_pi)
    if a in _EXACT_POINTS:
        return _EXACT_POINTS[a]
    # reduce to (-1, 1) so that unimodular(-a) is bitwise conj(unimodular(a))
    x = float(a - 2) if a > 1 else float(a)
    return complex(math.cos(math.pi * x), math.sin(math.pi * x))


def _weight(w, dim=None) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    if w.ndim == 0:
        w = w.reshape(1, 1)
    if dim is not None and w.shape != (dim, dim):
        raise ContractViolation(f"weight shape {w.shape} does not match dim {dim}")
    return w


@dataclass(frozen=True)
class Atom:
    angle_over_pi: Fraction
    weight: np.ndarray

    @property
    def zeta(self) -> complex:
        return unimodular(self.angle_over_pi)

    def conj_power(self, n: int) -> complex:
        """conj(zeta)^n, exact for rational angles."""
        return unimodular(-self.angle_over_pi * n)


@dataclass(frozen=True)
class Diverges:
    """Verdict that a derived measure or constant does not exist."""

    reason: str = ""

    def __str__(self):
        return "diverges"


@dataclass(frozen=True)
class OperatorMeasure:
    dim: int
    atoms: tuple = ()
    density: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dim < 1:
            raise ContractViolation("dimension must be positive")
        atoms = tuple(
            a if isinstance(a, Atom) else Atom(as_angle(a[0]), _weight(a[1], self.dim)) for a in self.atoms
        )
        for a in atoms:
            if a.weight.shape != (self.dim, self.dim):
                raise ContractViolation(f"atom weight shape {a.weight.shape} does not match dim {self.dim}")
            if not nx.is_hermitian(a.weight):
                raise ContractViolation("atom weight is not Hermitian")
            w = np.linalg.eigvalsh(nx.hermitian_part(a.weight))
            if w[0] < -1e-12 * max(abs(w[-1]), 1.0):
                raise ContractViolation(f"atom weight is not positive semidefinite (min eigenvalue {w[0]:.3e})")
        density = {}
        for n, c in dict(self.density).items():
            density[int(n)] = _weight(c, self.dim)
        for n in list(density):
            if -n not in density:
                density[-n] = density[n].conj().T
        for n, c in density.items():
            if np.max(np.abs(density[-n] - c.conj().T), initial=0.0) > 1e-12 * nx.scale(c):
                raise ContractViolation(f"density coefficients of order {n} and {-n} are not adjoint")
        density = {n: c for n, c in sorted(density.items()) if np.any(c != 0)}
        for n in [n for n in density if n > 0]:
            density[-n] = density[n].conj().T
        if 0 in density:
            density[0] = nx.hermitian_part(density[0])
        atoms = tuple(Atom(a.angle_over_pi, nx.hermitian_part(a.weight)) for a in atoms)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "density", density)
        if density:
            low = min_density_eigenvalue(self)
            if low < -1e-10:
                raise ContractViolation(f"density is not positive semidefinite on the circle (min {low:.3e})")

    @property
    def degree(self) -> int:
        return max((abs(n) for n in self.density), default=-1)

    @property
    def is_atomic(self) -> bool:
        return not self.density

    def __add__(self, other):
        if not isinstance(other, OperatorMeasure) or other.dim != self.dim:
            return NotImplemented
        dens = dict(self.density)
        for n, c in other.density.items():
            dens[n] = dens.get(n, 0) + c
        return OperatorMeasure(self.dim, self.atoms + other.atoms, dens)

    def scaled(self, c: float):
        if c < 0:
            raise ContractViolation("measures can only be scaled by non-negative numbers")
        return OperatorMeasure(
            self.dim,
            tuple(Atom(a.angle_over_pi, c * a.weight) for a in self.atoms),
            {n: c * d for n, d in self.density.items()},
        )

    def density_at(self, theta) -> np.ndarray:
        """Density matrices at angles theta, shape (len(theta), dim, dim)."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        out = np.zeros((theta.size, self.dim, self.dim), dtype=complex)
        for n, c in self.density.items():
            out += np.exp(1j * n * theta)[:, None, None] * c[None, :, :]
        return out


def min_density_eigenvalue(mu: OperatorMeasure, points: int = PSD_GRID) -> float:
    if not mu.density:
        return 0.0
    theta = TWO_PI * np.arange(points) / points
    vals = mu.density_at(theta)
    vals = (vals + np.conj(np.swapaxes(vals, 1, 2))) / 2
    return float(np.min(np.linalg.eigvalsh(vals)))


def fourier(mu: OperatorMeasure, n: int) -> np.ndarray:
    """muhat(n) = (1/2pi) int conj(zeta^n) dmu(zeta), in closed form."""
    out = np.zeros((mu.dim, mu.dim), dtype=complex)
    for a in mu.atoms:
        out = out + a.conj_power(n) * a.weight / TWO_PI
    d = mu.density.get(int(n))
    if d is not None:
        out = out + d
    return out


def fourier_table(mu: OperatorMeasure, nmax: int) -> dict:
    return {n: fourier(mu, n) for n in range(-nmax, nmax + 1)}


def total_mass(mu: OperatorMeasure) -> np.ndarray:
    return TWO_PI * fourier(mu, 0)


def poisson(mu: OperatorMeasure, z: complex) -> np.ndarray:
    """Poisson extension P_mu(z) for |z| < 1."""
    z = complex(z)
    r = abs(z)
    if r > 1 - 1e-9:
        raise BoundaryEvaluation(f"|z| = {r} is too close to the unit circle")
    out = np.zeros((mu.dim, mu.dim), dtype=complex)
    for a in mu.atoms:
        out = out + (1 - r * r) / abs(a.zeta - z) ** 2 * a.weight / TWO_PI
    for n, c in mu.density.items():
        out = out + (z**n if n >= 0 else z.conjugate() ** (-n)) * c
    return nx.hermitian_part(out)


def poisson_series(mu: OperatorMeasure, z: complex, nmax: int) -> np.ndarray:
    """Partial character series sum_{|n|<=nmax} muhat(n) r^{|n|} (z/r)^n."""
    z = complex(z)
    out = np.zeros((mu.dim, mu.dim), dtype=complex)
    for n in range(-nmax, nmax + 1):
        out = out + (z**n if n >= 0 else z.conjugate() ** (-n)) * fourier(mu, n)
    return out


@dataclass(frozen=True)
class ScalarMeasure:
    atoms: tuple  # of (zeta, complex mass)
    density: dict  # n -> complex coefficient

    def total_mass(self) -> complex:
        return sum((m for _, m in self.atoms), 0j) + TWO_PI * self.density.get(0, 0j)

    def total_variation(self, points: int = 8192) -> float:
        tv = sum(abs(m) for _, m in self.atoms)
        if self.density:
            theta = TWO_PI * (np.arange(points) + 0.5) / points
            vals = sum(c * np.exp(1j * n * theta) for n, c in self.density.items())
            tv += TWO_PI * float(np.mean(np.abs(vals)))
        return tv


def scalarize(mu: OperatorMeasure, x, y) -> ScalarMeasure:
    """The complex measure E -> <mu(E) x, y>."""
    x = nx.as_vector(x)
    y = nx.as_vector(y)
    if x.size != mu.dim or y.size != mu.dim:
        raise ContractViolation(f"vectors must have length {mu.dim}")
    atoms = tuple((a.zeta, complex(np.vdot(y, a.weight @ x))) for a in mu.atoms)
    density = {n: complex(np.vdot(y, c @ x)) for n, c in mu.density.items()}
    return ScalarMeasure(atoms, density)


def _is_one(a: Atom) -> bool:
    return a.angle_over_pi == 0


def tilde_measure(mu: OperatorMeasure, quad_points: int = 512, doublings: int = 3, growth: float = 2.0):
    """The measure dmu / |1 - zeta|^2, or :class:`Diverges`.

    Atoms move in closed form.  The density is divided on a half-offset
    circle grid (the node at zeta = 1 is never hit); the grid is doubled
    ``doublings`` times and the quotient is declared divergent when its
    sup grows by at least ``growth`` at every doubling, or exceeds 1e8.
    """
    atoms = []
    for a in mu.atoms:
        if _is_one(a):
            if np.any(a.weight != 0):
                return Diverges("atom at 1")
            continue
        atoms.append(Atom(a.angle_over_pi, a.weight / abs(1 - a.zeta) ** 2))
    if not mu.density:
        return OperatorMeasure(mu.dim, tuple(atoms))

    sups = []
    points = quad_points
    for _ in range(doublings + 1):
        theta = TWO_PI * (np.arange(points) + 0.5) / points
        quotient = mu.density_at(theta) / (np.abs(1 - np.exp(1j * theta)) ** 2)[:, None, None]
        sups.append(float(np.max(np.linalg.norm(quotient, ord=2, axis=(1, 2)))))
        if sups[-1] > 1e8:
            return Diverges(f"density quotient sup {sups[-1]:.3e} exceeds 1e8")
        points *= 2
    ratios = [b / a if a > 0 else 1.0 for a, b in zip(sups, sups[1:])]
    if all(r >= growth for r in ratios):
        return Diverges("density quotient grows under node doubling: " + ", ".join(f"{r:.2f}" for r in ratios))

    points //= 2
    k = mu.degree
    density = {}
    for n in range(-k, k + 1):
        c = np.mean(quotient * np.exp(-1j * n * theta)[:, None, None], axis=0)
        density[n] = c
    top = max(nx.scale(c) - 1 for c in density.values())
    density = {n: np.where(np.abs(c) > 1e-13 * max(top, 1e-300), c, 0) for n, c in density.items()}
    density = {n: (c + density[-n].conj().T) / 2 for n, c in density.items()}
    return OperatorMeasure(mu.dim, tuple(atoms), density)


# ---------------------------------------------------------------- constructors


def zero(dim: int = 1) -> OperatorMeasure:
    return OperatorMeasure(dim)


def lebesgue(dim: int = 1) -> OperatorMeasure:
    """Arc length times the identity."""
    return OperatorMeasure(dim, (), {0: np.eye(dim)})


def point_mass(angle_over_pi, weight=1.0, dim: int | None = None) -> OperatorMeasure:
    """2 pi delta_zeta W, so that muhat(n) = W conj(zeta)^n."""
    w = _weight(weight)
    dim = w.shape[0] if dim is None else dim
    return OperatorMeasure(dim, (Atom(as_angle(angle_over_pi), TWO_PI * _weight(w, dim)),))


def trig_density(coeffs: dict, dim: int = 1) -> OperatorMeasure:
    return OperatorMeasure(dim, (), coeffs)


def abs_one_minus_zeta_fejer(degree: int = 8) -> OperatorMeasure:
    """Fejer mean of the density |1 - zeta| (nonnegative trigonometric approximation)."""
    coeffs = {}
    for n in range(-degree, degree + 1):
        exact = 4.0 / (math.pi * (1 - 4 * n * n))
        coeffs[n] = (1 - abs(n) / (degree + 1)) * exact
    return OperatorMeasure(1, (), coeffs)


def abs_one_minus_zeta_power4() -> OperatorMeasure:
    """Density |1 - zeta|^4 = 6 - 4(zeta + conj zeta) + (zeta^2 + conj zeta^2)."""
    return OperatorMeasure(1, (), {0: 6.0, 1: -4.0, 2: 1.0})


# ---------------------------------------------------------------- serialization


def _angle_str(a: Fraction) -> str:
    return f"{a.numerator}/{a.denominator}" if a.denominator != 1 else str(a.numerator)


def _unpack(c, dim):
    c = np.asarray(c)
    return c.item() if dim == 1 else c.tolist()


def to_dict(mu: OperatorMeasure) -> dict:
    return {
        "dim": mu.dim,
        "atoms": [
            {
                "angle_over_pi": _angle_str(a.angle_over_pi),
                "weight_real": _unpack(a.weight.real, mu.dim),
                "weight_imag": _unpack(a.weight.imag, mu.dim),
            }
            for a in mu.atoms
        ],
        "density": [
            {"n": n, "coeff_real": _unpack(c.real, mu.dim), "coeff_imag": _unpack(c.imag, mu.dim)}
            for n, c in mu.density.items()
            if n >= 0
        ],
    }


def from_dict(doc: dict) -> OperatorMeasure:
    if not isinstance(doc, dict):
        raise ContractViolation("measure document must be an object")
    try:
        dim = int(doc.get("dim", 1))
        atoms = []
        for i, a in enumerate(doc.get("atoms", [])):
            for key in ("angle_over_pi", "weight_real"):
                if key not in a:
                    raise ContractViolation(f"atoms[{i}]: missing field {key!r}")
            w = np.asarray(a["weight_real"], dtype=float) + 1j * np.asarray(a.get("weight_imag", 0.0), dtype=float)
            atoms.append(Atom(as_angle(a["angle_over_pi"]), _weight(w, dim)))
        density = {}
        for i, d in enumerate(doc.get("density", [])):
            for key in ("n", "coeff_real"):
                if key not in d:
                    raise ContractViolation(f"density[{i}]: missing field {key!r}")
            c = np.asarray(d["coeff_real"], dtype=float) + 1j * np.asarray(d.get("coeff_imag", 0.0), dtype=float)
            density[int(d["n"])] = _weight(c, dim)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ContractViolation):
            raise
        raise ContractViolation(f"malformed measure document: {exc}") from exc
    return OperatorMeasure(dim, tuple(atoms), density)


def loads(text: str) -> OperatorMeasure:
    return from_dict(json.loads(text))


def dumps(mu: OperatorMeasure) -> str:
    return json.dumps(to_dict(mu), sort_keys=True)
