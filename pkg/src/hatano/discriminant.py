"""The trace polynomial Delta_n(E) = Tr(A_{E,n} ... A_{E,1}).

Two deliberately independent evaluation paths:

* pointwise scaled transfer products (standard: kernel doubles with
  Frobenius rescaling; extended: double-double entries with power-of-two
  rescaling so the scale bookkeeping stays exact);
* a global monic coefficient expansion in double-double (``disc_coeffs``),
  which also feeds the polynomial root finder.

Each path serves as the other's test oracle: values span e^{+-gamma n} and
silent cancellation must be detectable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .dd import (DoubleDouble, dd_add, dd_ldexp, dd_mul, dd_sub,
                 v_dd_add, v_dd_mul_d, v_dd_sub)
from .errors import CapabilityExceeded
from .potential import PotentialSample
from .scaled import ScaledReal, scaled_from_log

LN2 = math.log(2.0)

COEFF_N_MAX = 256
# below this answer scale double-double refuses rather than returning noise
EXTENDED_CAPABILITY = 1e-28


@dataclass(frozen=True)
class DiscriminantEval:
    value: ScaledReal
    derivative: ScaledReal | None
    energy: float


@dataclass(frozen=True)
class DiscCoeffs:
    """Monic coefficients of Delta_n in double-double, constant term first."""

    hi: np.ndarray
    lo: np.ndarray

    @property
    def degree(self):
        return len(self.hi) - 1

    def as_pair(self):
        return self.hi, self.lo

    def derivative_pair(self):
        k = np.arange(1, len(self.hi))
        return self.hi[1:] * k, self.lo[1:] * k

    def eval_dd(self, x) -> DoubleDouble:
        """Scalar double-double Horner evaluation."""
        if not isinstance(x, DoubleDouble):
            x = DoubleDouble.from_float(x)
        phi, plo = self.hi[-1], self.lo[-1]
        for k in range(len(self.hi) - 2, -1, -1):
            phi, plo = dd_mul(phi, plo, x.hi, x.lo)
            phi, plo = dd_add(phi, plo, self.hi[k], self.lo[k])
        return DoubleDouble._raw(phi, plo)

    def eval_float(self, x):
        return float(self.eval_dd(x))

    def with_constant_shifted(self, delta: DoubleDouble):
        """Coefficients of Delta_n(E) + delta (shifts the constant term)."""
        hi = self.hi.copy()
        lo = self.lo.copy()
        hi[0], lo[0] = dd_add(hi[0], lo[0], delta.hi, delta.lo)
        return DiscCoeffs(hi, lo)


def chebyshev_disc(n, E):
    """Zero-potential analytic oracle: 2 T_n(E/2) by the stable recurrence."""
    p_prev, p = 2.0, float(E)
    for _ in range(n - 1):
        p_prev, p = p, E * p - p_prev
    return p if n >= 1 else p_prev


def eval_disc(sample: PotentialSample, E, precision="standard") -> DiscriminantEval:
    """Delta_n(E) as a ScaledReal."""
    if precision == "standard":
        sign, logmag, _ = kernels.disc_trace_grid(sample.values, [float(E)])
        value = scaled_from_log(int(sign[0]), float(logmag[0]))
    elif precision == "extended":
        tr, twos = _dd_trace(sample.values, E)
        value = _scaled_from_dd(tr, twos)
    else:
        raise ValueError(f"unknown precision {precision!r}")
    return DiscriminantEval(value=value, derivative=None, energy=float(E))


def eval_disc_deriv(sample: PotentialSample, E, precision="standard") -> DiscriminantEval:
    """Delta_n(E) and Delta_n'(E), derivative by forward accumulation."""
    if precision == "standard":
        sign, logmag, dsign, dlogmag, _ = kernels.disc_trace_deriv_grid(
            sample.values, [float(E)])
        value = scaled_from_log(int(sign[0]), float(logmag[0]))
        deriv = scaled_from_log(int(dsign[0]), float(dlogmag[0]))
    elif precision == "extended":
        tr, dtr, twos = _dd_trace_deriv(sample.values, E)
        value = _scaled_from_dd(tr, twos)
        deriv = _scaled_from_dd(dtr, twos)
    else:
        raise ValueError(f"unknown precision {precision!r}")
    return DiscriminantEval(value=value, derivative=deriv, energy=float(E))


def disc_coeffs(sample: PotentialSample) -> DiscCoeffs:
    """Monic coefficient expansion of Delta_n via polynomial 2x2 products."""
    n = sample.n
    if n > COEFF_N_MAX:
        raise CapabilityExceeded(f"coefficient path supports n <= {COEFF_N_MAX}, got {n}")
    m = n + 1
    zeros = np.zeros(m)
    a_hi, a_lo = zeros.copy(), zeros.copy()
    b_hi, b_lo = zeros.copy(), zeros.copy()
    c_hi, c_lo = zeros.copy(), zeros.copy()
    d_hi, d_lo = zeros.copy(), zeros.copy()
    a_hi[0] = 1.0
    d_hi[0] = 1.0
    for vk in sample.values:
        # top row <- (E - v_k) * top - bottom; bottom <- old top
        sa_hi, sa_lo = _shift_up(a_hi), _shift_up(a_lo)
        sb_hi, sb_lo = _shift_up(b_hi), _shift_up(b_lo)
        ta_hi, ta_lo = v_dd_mul_d(a_hi, a_lo, float(vk))
        tb_hi, tb_lo = v_dd_mul_d(b_hi, b_lo, float(vk))
        na_hi, na_lo = v_dd_sub(sa_hi, sa_lo, ta_hi, ta_lo)
        na_hi, na_lo = v_dd_sub(na_hi, na_lo, c_hi, c_lo)
        nb_hi, nb_lo = v_dd_sub(sb_hi, sb_lo, tb_hi, tb_lo)
        nb_hi, nb_lo = v_dd_sub(nb_hi, nb_lo, d_hi, d_lo)
        c_hi, c_lo = a_hi, a_lo
        d_hi, d_lo = b_hi, b_lo
        a_hi, a_lo = na_hi, na_lo
        b_hi, b_lo = nb_hi, nb_lo
    hi, lo = v_dd_add(a_hi, a_lo, d_hi, d_lo)
    return DiscCoeffs(hi=hi, lo=lo)


def _shift_up(arr):
    out = np.zeros_like(arr)
    out[1:] = arr[:-1]
    return out


# ---------------------------------------------------------------------------
# double-double pointwise products (power-of-two rescaling; the twos
# exponent keeps the scale bookkeeping exact)
# ---------------------------------------------------------------------------

def _dd_x(E, vk):
    if isinstance(E, DoubleDouble):
        return dd_sub(E.hi, E.lo, float(vk), 0.0)
    return dd_sub(float(E), 0.0, float(vk), 0.0)


def _rescale4(entries, twos):
    mx = max(abs(e[0]) for e in entries)
    if mx == 0.0:
        return entries, twos
    k = int(math.floor(math.log2(mx)))
    if k != 0:
        entries = [dd_ldexp(h, l, -k) for (h, l) in entries]
        twos += k
    return entries, twos


def _dd_trace(values, E):
    a, b, c, d = (1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)
    twos = 0
    for vk in values:
        x = _dd_x(E, vk)
        na = dd_sub(*dd_mul(*x, *a), *c)
        nb = dd_sub(*dd_mul(*x, *b), *d)
        c, d = a, b
        a, b = na, nb
        (a, b, c, d), twos = _rescale4([a, b, c, d], twos)
    tr = dd_add(*a, *d)
    return DoubleDouble._raw(*tr), twos


def _dd_trace_deriv(values, E):
    a, b, c, d = (1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)
    da, db, dc, dd_ = (0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)
    twos = 0
    for vk in values:
        x = _dd_x(E, vk)
        nda = dd_add(*a, *dd_sub(*dd_mul(*x, *da), *dc))
        ndb = dd_add(*b, *dd_sub(*dd_mul(*x, *db), *dd_))
        dc, dd_ = da, db
        da, db = nda, ndb
        na = dd_sub(*dd_mul(*x, *a), *c)
        nb = dd_sub(*dd_mul(*x, *b), *d)
        c, d = a, b
        a, b = na, nb
        entries, twos0 = _rescale4([a, b, c, d], 0)
        if twos0 != 0:
            a, b, c, d = entries
            da, db, dc, dd_ = [dd_ldexp(h, l, -twos0) for (h, l) in (da, db, dc, dd_)]
            twos += twos0
    tr = dd_add(*a, *d)
    dtr = dd_add(*da, *dd_)
    return DoubleDouble._raw(*tr), DoubleDouble._raw(*dtr), twos


def _scaled_from_dd(x: DoubleDouble, twos: int) -> ScaledReal:
    if x.hi == 0.0 and x.lo == 0.0:
        return ScaledReal.zero()
    sign = 1 if x.hi > 0 or (x.hi == 0 and x.lo > 0) else -1
    ax = abs(x)
    logmag = math.log(ax.hi) + math.log1p(ax.lo / ax.hi) + twos * LN2
    return ScaledReal(sign, logmag)


def dd_trace_minus_target(sample: PotentialSample, E, target: DoubleDouble):
    """Delta_n(E) - target as (difference DD, twos) with difference scaled by
    2**twos; used by extended-precision Newton refinement of eigenvalues.

    ``target`` must satisfy |target| < 2**1000 after down-scaling; callers
    enforce n g <= 700.
    """
    tr, twos = _dd_trace(sample.values, E)
    t_scaled = DoubleDouble._raw(*dd_ldexp(target.hi, target.lo, -twos))
    return tr - t_scaled, twos
