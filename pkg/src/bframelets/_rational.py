"""Exact rational scalars and square roots of rationals."""

from __future__ import annotations

import math
from dataclasses import dataclass

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    from fractions import Fraction as Q


def to_q(value) -> Q:
    """Convert an int, float, Fraction, mpq or ``"p/q"`` string to an exact rational.

    Floats are converted exactly (every finite double is a dyadic rational).
    """
    if isinstance(value, str):
        num, _, den = value.partition("/")
        return Q(int(num), int(den)) if den else Q(int(num))
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"cannot convert {value!r} to a rational")
        num, den = value.as_integer_ratio()
        return Q(num, den)
    return Q(value)


def q_str(value) -> str:
    q = Q(value)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _rational_sqrt(q: Q) -> Q | None:
    if q < 0:
        return None
    num, den = int(q.numerator), int(q.denominator)
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Q(rn, rd)
    return None


@dataclass(frozen=True)
class SqrtRational:
    """The real number ``sign * sqrt(square)`` with ``square`` an exact rational."""

    square: Q
    sign: int = 1

    def __post_init__(self):
        if self.square < 0:
            raise ValueError("square must be nonnegative")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @classmethod
    def of(cls, value) -> SqrtRational:
        """Wrap a rational (or float) value ``v`` as ``sign(v) * sqrt(v**2)``."""
        q = to_q(value)
        return cls(q * q, -1 if q < 0 else 1)

    @classmethod
    def sqrt(cls, value) -> SqrtRational:
        return cls(to_q(value))

    def __mul__(self, other):
        if not isinstance(other, SqrtRational):
            other = SqrtRational.of(other)
        return SqrtRational(self.square * other.square, self.sign * other.sign)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, SqrtRational):
            other = SqrtRational.of(other)
        if other.square == 0:
            raise ZeroDivisionError("division by zero scale")
        return SqrtRational(self.square / other.square, self.sign * other.sign)

    def __neg__(self):
        return SqrtRational(self.square, -self.sign)

    def __float__(self):
        return self.sign * math.sqrt(self.square)

    def rational(self) -> Q | None:
        """The exact value when it is rational, else ``None``."""
        r = _rational_sqrt(self.square)
        return None if r is None else self.sign * r

    def ratio(self, other: SqrtRational) -> Q | None:
        """``self / other`` as an exact rational when possible."""
        return (self / other).rational()

    def __repr__(self):
        s = "-" if self.sign < 0 else ""
        return f"{s}sqrt({q_str(self.square)})"


ONE = SqrtRational(Q(1))
