"""Bracketed root refinement on sign + log-magnitude function values.

``refine_root`` is the scalar entry point (bisection, guaranteed; secant
acceleration optional). ``bisect_batch`` refines many brackets in lockstep
so that batched discriminant evaluations can amortize one kernel call per
iteration across all targets of a sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dd import DoubleDouble
from .errors import BracketInvalid, ToleranceUnreachable
from .scaled import ScaledReal

_EPS = 2.220446049250313e-16
MAX_BISECT_STEPS = 120
MAX_BISECT_STEPS_EXTENDED = 220


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo_sign: int
    f_hi_sign: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BracketInvalid(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if self.f_lo_sign * self.f_hi_sign != -1:
            raise BracketInvalid(
                f"endpoint signs must be opposite, got {self.f_lo_sign}, {self.f_hi_sign}"
            )

    @classmethod
    def from_function(cls, f, lo, hi):
        return cls(lo, hi, _sign_of(f(lo)), _sign_of(f(hi)))


def _sign_of(value):
    if isinstance(value, ScaledReal):
        return value.sign
    v = float(value)
    return 0 if v == 0.0 else (1 if v > 0.0 else -1)


def _float_of(value):
    if isinstance(value, ScaledReal):
        if value.sign == 0:
            return 0.0
        return value.sign * math.exp(min(value.logmag, 700.0))
    return float(value)


def refine_root(f, bracket: Bracket, tol_abs: float, precision: str = "standard",
                use_secant: bool = True):
    """Refine a bracketed root of ``f`` to an enclosure of width <= tol_abs.

    ``f`` maps a float (standard) or a DoubleDouble (extended) to a
    ScaledReal or plain number; only the sign drives the bracket update,
    magnitudes feed the optional secant acceleration. Returns a float in
    standard precision and a DoubleDouble in extended precision.
    """
    if precision == "standard":
        return _refine_standard(f, bracket, tol_abs, use_secant)
    if precision == "extended":
        return _refine_extended(f, bracket, tol_abs)
    raise ValueError(f"unknown precision {precision!r}")


def _refine_standard(f, bracket, tol_abs, use_secant):
    lo, hi = bracket.lo, bracket.hi
    slo = bracket.f_lo_sign
    scale = max(1.0, abs(lo), abs(hi))
    if tol_abs < 4.0 * _EPS * scale:
        raise ToleranceUnreachable(
            f"tol_abs={tol_abs} below double capability {4.0 * _EPS * scale}"
        )
    flo = fhi = None
    for it in range(MAX_BISECT_STEPS):
        width = hi - lo
        if width <= tol_abs:
            break
        x = 0.5 * (lo + hi)
        # secant candidate on alternate iterations, kept well inside
        if use_secant and it % 2 == 1 and flo is not None and fhi is not None:
            denom = fhi - flo
            if denom != 0.0:
                xs = (lo * fhi - hi * flo) / denom
                if lo + 0.1 * width < xs < hi - 0.1 * width:
                    x = xs
        val = f(x)
        s = _sign_of(val)
        if s == 0:
            return x
        if s == slo:
            lo, flo = x, _float_of(val)
        else:
            hi, fhi = x, _float_of(val)
    return 0.5 * (lo + hi)


def _refine_extended(f, bracket, tol_abs):
    lo = DoubleDouble.from_float(bracket.lo)
    hi = DoubleDouble.from_float(bracket.hi)
    slo = bracket.f_lo_sign
    scale = max(1.0, abs(bracket.lo), abs(bracket.hi))
    if tol_abs < 1e-28 * scale:
        raise ToleranceUnreachable(
            f"tol_abs={tol_abs} below extended capability {1e-28 * scale}"
        )
    for _ in range(MAX_BISECT_STEPS_EXTENDED):
        width = hi - lo
        if float(width) <= tol_abs:
            break
        x = (lo + hi) * 0.5
        s = _sign_of(f(x))
        if s == 0:
            return x
        if s == slo:
            lo = x
        else:
            hi = x
    return (lo + hi) * 0.5


def bisect_batch(eval_signs, lo, hi, slo, iters=60):
    """Lockstep bisection of many brackets.

    eval_signs: callable mapping an energy array to an int sign array.
    lo, hi: bracket endpoint arrays; slo: sign array at ``lo``.
    Entries whose midpoint evaluates to exactly zero collapse immediately.
    Returns the midpoint array of the final brackets.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    slo = np.asarray(slo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        s = eval_signs(mid)
        take_lo = s == slo
        zero = s == 0
        lo = np.where(take_lo & ~zero, mid, lo)
        hi = np.where(~take_lo & ~zero, mid, hi)
        lo = np.where(zero, mid, lo)
        hi = np.where(zero, mid, hi)
        if np.all(hi - lo <= 0.0):
            break
    return 0.5 * (lo + hi)
