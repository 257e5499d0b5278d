"""Sign + log-magnitude representation for quantities growing like e^{gamma n}.

A ``ScaledReal`` stores the value ``sign * exp(logmag)`` without ever
materializing the exponential, so trace values and turning-point magnitudes
of order e^{several hundred} stay representable. Arithmetic works directly
on log magnitudes (log-sum-exp for addition).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

NEG_INF = float("-inf")


@dataclass(frozen=True)
class ScaledReal:
    """sign in {-1, 0, +1}; logmag = natural log of |value| (-inf iff sign 0)."""

    sign: int
    logmag: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign}")
        if (self.sign == 0) != (self.logmag == NEG_INF):
            raise ValueError("logmag must be -inf exactly when sign is 0")

    @classmethod
    def zero(cls):
        return cls(0, NEG_INF)

    @classmethod
    def from_float(cls, x):
        x = float(x)
        if x == 0.0:
            return cls.zero()
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    def to_float(self):
        """Materialize as a plain float; overflows to signed inf."""
        if self.sign == 0:
            return 0.0
        if self.logmag > 709.0:
            return math.inf * self.sign
        return self.sign * math.exp(self.logmag)

    def __neg__(self):
        return ScaledReal(-self.sign, self.logmag)

    def __abs__(self):
        return ScaledReal(abs(self.sign), self.logmag)

    def __mul__(self, other):
        return scaled_mul(self, other)

    def __add__(self, other):
        return scaled_add(self, other)

    def __sub__(self, other):
        return scaled_add(self, -other)

    def _key(self):
        # orders by represented value
        return (self.sign, self.sign * self.logmag)

    def __lt__(self, other):
        return self._key() < other._key()

    def __le__(self, other):
        return self._key() <= other._key()

    def __gt__(self, other):
        return self._key() > other._key()

    def __ge__(self, other):
        return self._key() >= other._key()


def scaled_mul(a: ScaledReal, b: ScaledReal) -> ScaledReal:
    sign = a.sign * b.sign
    if sign == 0:
        return ScaledReal.zero()
    return ScaledReal(sign, a.logmag + b.logmag)


def scaled_add(a: ScaledReal, b: ScaledReal) -> ScaledReal:
    if a.sign == 0:
        return b
    if b.sign == 0:
        return a
    if a.logmag < b.logmag:
        a, b = b, a
    d = b.logmag - a.logmag  # <= 0
    if a.sign == b.sign:
        return ScaledReal(a.sign, a.logmag + math.log1p(math.exp(d)))
    if d == 0.0:
        return ScaledReal.zero()
    return ScaledReal(a.sign, a.logmag + math.log1p(-math.exp(d)))


def scaled_from_log(sign: int, logmag: float) -> ScaledReal:
    """Build a ScaledReal, normalizing the zero case."""
    if sign == 0 or logmag == NEG_INF:
        return ScaledReal.zero()
    return ScaledReal(1 if sign > 0 else -1, logmag)
