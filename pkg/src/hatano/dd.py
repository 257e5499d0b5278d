"""Double-double arithmetic: unevaluated sums hi + lo of two floats.

Gives roughly 31 significant decimal digits. Two layers are provided:

* tuple functions (``dd_add``, ``dd_mul``, ...) operating on ``(hi, lo)``
  pairs of floats -- used in hot scalar paths;
* ``v_*`` functions operating elementwise on ``(hi, lo)`` pairs of numpy
  arrays -- used for polynomial coefficient arithmetic;
* a small ``DoubleDouble`` wrapper class for API-level convenience.

Error-free transformations follow Dekker/Knuth; transcendentals follow the
classic QD library (argument reduction + short Taylor series). Splitting
overflows for inputs above ~1e292; all users in this package stay far below.
"""

from __future__ import annotations

import math

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1

# log(2) to double-double precision
_LN2_HI = 0.6931471805599453
_LN2_LO = 2.3190468138462996e-17

EPS_DD = 1.232595164407831e-32  # 2**-106


# ---------------------------------------------------------------------------
# error-free transformations (scalar)
# ---------------------------------------------------------------------------

def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def quick_two_sum(a, b):
    # requires |a| >= |b|
    s = a + b
    return s, b - (s - a)


def split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ahi, alo = split(a)
    bhi, blo = split(b)
    return p, ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo


# ---------------------------------------------------------------------------
# scalar double-double ops on (hi, lo) tuples
# ---------------------------------------------------------------------------

def dd_add(ahi, alo, bhi, blo):
    s1, s2 = two_sum(ahi, bhi)
    t1, t2 = two_sum(alo, blo)
    s2 += t1
    s1, s2 = quick_two_sum(s1, s2)
    s2 += t2
    return quick_two_sum(s1, s2)


def dd_sub(ahi, alo, bhi, blo):
    return dd_add(ahi, alo, -bhi, -blo)


def dd_mul(ahi, alo, bhi, blo):
    p1, p2 = two_prod(ahi, bhi)
    p2 += ahi * blo + alo * bhi
    return quick_two_sum(p1, p2)


def dd_mul_d(ahi, alo, b):
    p1, p2 = two_prod(ahi, b)
    p2 += alo * b
    return quick_two_sum(p1, p2)


def dd_add_d(ahi, alo, b):
    s1, s2 = two_sum(ahi, b)
    s2 += alo
    return quick_two_sum(s1, s2)


def dd_div(ahi, alo, bhi, blo):
    q1 = ahi / bhi
    rhi, rlo = dd_sub(ahi, alo, *dd_mul_d(bhi, blo, q1))
    q2 = rhi / bhi
    rhi, rlo = dd_sub(rhi, rlo, *dd_mul_d(bhi, blo, q2))
    q3 = rhi / bhi
    q1, q2 = quick_two_sum(q1, q2)
    return dd_add_d(q1, q2, q3)


def dd_div_d(ahi, alo, b):
    return dd_div(ahi, alo, b, 0.0)


def dd_sqrt(ahi, alo):
    if ahi == 0.0:
        return 0.0, 0.0
    y = math.sqrt(ahi)
    # one Newton step: y + (a - y^2) / (2 y)
    y2hi, y2lo = two_prod(y, y)
    rhi, rlo = dd_sub(ahi, alo, y2hi, y2lo)
    return dd_add_d(rhi / (2.0 * y), rlo / (2.0 * y), y)


def dd_neg(ahi, alo):
    return -ahi, -alo


def dd_abs(ahi, alo):
    return (-ahi, -alo) if ahi < 0.0 else (ahi, alo)


def dd_cmp(ahi, alo, bhi, blo):
    if ahi < bhi:
        return -1
    if ahi > bhi:
        return 1
    if alo < blo:
        return -1
    if alo > blo:
        return 1
    return 0


def dd_ldexp(ahi, alo, k):
    return math.ldexp(ahi, k), math.ldexp(alo, k)


def dd_exp(ahi, alo):
    """exp of a double-double; valid for |a| < 709."""
    if ahi <= -709.0:
        return 0.0, 0.0
    if ahi >= 709.0:
        raise OverflowError("dd_exp argument too large")
    m = math.floor(ahi / _LN2_HI + 0.5)
    rhi, rlo = dd_sub(ahi, alo, *dd_mul_d(_LN2_HI, _LN2_LO, m))
    # reduce to |r| < ln2 / 1024, sum Taylor, square back up
    rhi, rlo = dd_ldexp(rhi, rlo, -9)
    shi, slo = dd_add_d(rhi, rlo, 1.0)
    thi, tlo = rhi, rlo
    fact = 1.0
    for k in range(2, 10):
        thi, tlo = dd_mul(thi, tlo, rhi, rlo)
        fact *= k
        shi, slo = dd_add(shi, slo, *dd_div_d(thi, tlo, fact))
        if abs(thi) < fact * 1e-35:
            break
    for _ in range(9):
        shi, slo = dd_mul(shi, slo, shi, slo)
    return dd_ldexp(shi, slo, int(m))


def dd_log(ahi, alo):
    """Natural log of a positive double-double."""
    if ahi <= 0.0:
        raise ValueError("dd_log requires a positive argument")
    x = math.log(ahi)
    # one Newton step on exp(y) = a:  y <- y + (a * exp(-y) - 1)
    ehi, elo = dd_exp(-x, 0.0)
    phi, plo = dd_mul(ahi, alo, ehi, elo)
    dhi, dlo = dd_add_d(phi, plo, -1.0)
    return dd_add_d(dhi, dlo, x)


def dd_cosh(ahi, alo):
    """cosh of a double-double; argument magnitude < 709."""
    ehi, elo = dd_exp(*dd_abs(ahi, alo))
    if abs(ahi) >= 40.0:
        # e^{-|a|} / e^{|a|} < 1e-34: below double-double resolution, and
        # forming the reciprocal would overflow the splitter above ~1e292
        return dd_ldexp(ehi, elo, -1)
    ihi, ilo = dd_div(1.0, 0.0, ehi, elo)
    shi, slo = dd_add(ehi, elo, ihi, ilo)
    return dd_ldexp(shi, slo, -1)


# ---------------------------------------------------------------------------
# vectorized (numpy) double-double ops
# ---------------------------------------------------------------------------

def v_two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def v_quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def v_two_prod(a, b):
    p = a * b
    t = _SPLITTER * a
    ahi = t - (t - a)
    alo = a - ahi
    t = _SPLITTER * b
    bhi = t - (t - b)
    blo = b - bhi
    return p, ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo


def v_dd_add(ahi, alo, bhi, blo):
    s1, s2 = v_two_sum(ahi, bhi)
    t1, t2 = v_two_sum(alo, blo)
    s2 = s2 + t1
    s1, s2 = v_quick_two_sum(s1, s2)
    s2 = s2 + t2
    return v_quick_two_sum(s1, s2)


def v_dd_sub(ahi, alo, bhi, blo):
    return v_dd_add(ahi, alo, -bhi, -blo)


def v_dd_mul(ahi, alo, bhi, blo):
    p1, p2 = v_two_prod(ahi, bhi)
    p2 = p2 + ahi * blo + alo * bhi
    return v_quick_two_sum(p1, p2)


def v_dd_mul_d(ahi, alo, b):
    p1, p2 = v_two_prod(ahi, b)
    p2 = p2 + alo * b
    return v_quick_two_sum(p1, p2)


# ---------------------------------------------------------------------------
# wrapper class
# ---------------------------------------------------------------------------

class DoubleDouble:
    """A hi + lo float pair with |lo| <= ulp(hi)/2."""

    __slots__ = ("hi", "lo")

    def __init__(self, hi=0.0, lo=0.0):
        hi, lo = two_sum(float(hi), float(lo))
        self.hi = hi
        self.lo = lo

    @classmethod
    def _raw(cls, hi, lo):
        self = object.__new__(cls)
        self.hi = hi
        self.lo = lo
        return self

    @classmethod
    def from_float(cls, x):
        return cls._raw(float(x), 0.0)

    def __float__(self):
        # hi/lo may be numpy scalars; __float__ must return a builtin float
        return float(self.hi + self.lo)

    def __repr__(self):
        return f"DoubleDouble({self.hi!r}, {self.lo!r})"

    def _coerce(self, other):
        if isinstance(other, DoubleDouble):
            return other.hi, other.lo
        if isinstance(other, (int, float)):
            return float(other), 0.0
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return DoubleDouble._raw(*dd_add(self.hi, self.lo, *o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return DoubleDouble._raw(*dd_sub(self.hi, self.lo, *o))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return DoubleDouble._raw(*dd_sub(*o, self.hi, self.lo))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return DoubleDouble._raw(*dd_mul(self.hi, self.lo, *o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return DoubleDouble._raw(*dd_div(self.hi, self.lo, *o))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return DoubleDouble._raw(*dd_div(*o, self.hi, self.lo))

    def __neg__(self):
        return DoubleDouble._raw(-self.hi, -self.lo)

    def __abs__(self):
        return DoubleDouble._raw(*dd_abs(self.hi, self.lo))

    def _cmp(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return dd_cmp(self.hi, self.lo, *o)

    def __eq__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c == 0

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c >= 0

    def __hash__(self):
        return hash((self.hi, self.lo))

    def sqrt(self):
        return DoubleDouble._raw(*dd_sqrt(self.hi, self.lo))

    def exp(self):
        return DoubleDouble._raw(*dd_exp(self.hi, self.lo))

    def log(self):
        return DoubleDouble._raw(*dd_log(self.hi, self.lo))


def dd_sum_array(hi, lo):
    """Exact-ish sum of a vector of double-doubles, returned as a tuple."""
    shi, slo = 0.0, 0.0
    for h, l in zip(np.asarray(hi, dtype=float), np.asarray(lo, dtype=float)):
        shi, slo = dd_add(shi, slo, h, l)
    return shi, slo
