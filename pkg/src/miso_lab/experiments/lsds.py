"""Right shifts on L^2((0, inf); s ds) acting on step functions."""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from ..errors import ContractViolation


def _exact(*xs):
    return all(isinstance(x, Rational) for x in xs)


def shift_Lsds_norm(t, breakpoints, values):
    """||S(t) f||^2 where f = values[i] on (breakpoints[i], breakpoints[i+1]).

    (S(t)f)(s) = f(s - t) for s >= t and 0 before, so each piece contributes
    |v|^2 ((b1 + t)^2 - (b0 + t)^2) / 2.  Rational inputs give an exact
    ``Fraction``; anything else is evaluated in floating point.
    """
    bps = list(breakpoints)
    vals = list(values)
    if len(bps) != len(vals) + 1:
        raise ContractViolation("need one more breakpoint than values")
    if t < 0:
        raise ContractViolation("shift time must be non-negative")
    if bps and bps[0] < 0:
        raise ContractViolation("breakpoints must be non-negative")
    if any(b <= a for a, b in zip(bps, bps[1:])):
        raise ContractViolation("breakpoints must be strictly increasing")
    exact = _exact(t, *bps) and all(_exact(v) for v in vals)
    if exact:
        t = Fraction(t)
        bps = [Fraction(b) for b in bps]
        half = Fraction(1, 2)
    else:
        half = 0.5
    total = Fraction(0) if exact else 0.0
    for v, b0, b1 in zip(vals, bps, bps[1:]):
        mag = v * v if exact else abs(v) ** 2
        total += mag * ((b1 + t) ** 2 - (b0 + t) ** 2) * half
    return total


def second_difference(t, breakpoints, values):
    """||S(2t)f||^2 - 2||S(t)f||^2 + ||f||^2, which vanishes for a 2-isometric semigroup."""
    return (
        shift_Lsds_norm(2 * t, breakpoints, values)
        - 2 * shift_Lsds_norm(t, breakpoints, values)
        + shift_Lsds_norm(0 * t, breakpoints, values)
    )
