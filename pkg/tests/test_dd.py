"""Double-double arithmetic against mpmath at 50 digits."""

import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hatano import dd

mpmath.mp.dps = 50

finite = st.floats(min_value=-1e30, max_value=1e30,
                   allow_nan=False, allow_infinity=False)
nonzero = finite.filter(lambda x: abs(x) > 1e-30)


def to_mp(hi, lo):
    return mpmath.mpf(hi) + mpmath.mpf(lo)


def assert_close_dd(pair, exact, rel=4e-31, abs_tol=0.0):
    got = to_mp(*pair)
    scale = max(abs(exact), mpmath.mpf(1e-300))
    assert abs(got - exact) <= rel * scale + abs_tol, (pair, exact)


@given(finite, finite)
def test_two_sum_exact(a, b):
    s, e = dd.two_sum(a, b)
    assert Fraction(s) + Fraction(e) == Fraction(a) + Fraction(b)


normal = st.floats(min_value=1e-120, max_value=1e120).flatmap(
    lambda m: st.sampled_from([m, -m]))


@given(normal, normal)
def test_two_prod_exact(a, b):
    # the error-free transformation holds when the product stays normal
    p, e = dd.two_prod(a, b)
    assert Fraction(p) + Fraction(e) == Fraction(a) * Fraction(b)


@given(finite, finite)
@settings(max_examples=200)
def test_add(a, b):
    assert_close_dd(dd.dd_add(a, 0.0, b, 0.0), mpmath.mpf(a) + mpmath.mpf(b))


@given(normal, normal)
@settings(max_examples=200)
def test_mul_div(a, b):
    # operands kept in the normal range so products/quotients stay normal
    assert_close_dd(dd.dd_mul(a, 0.0, b, 0.0), mpmath.mpf(a) * mpmath.mpf(b))
    assert_close_dd(dd.dd_div(a, 0.0, b, 0.0), mpmath.mpf(a) / mpmath.mpf(b))


@given(st.floats(min_value=1e-290, max_value=1e290))
def test_sqrt_log(a):
    # below ~1e-290 the Newton residual's error term goes subnormal
    assert_close_dd(dd.dd_sqrt(a, 0.0), mpmath.sqrt(mpmath.mpf(a)))
    # near a = 1 the log is ~0 while the error stays absolute in the argument
    assert_close_dd(dd.dd_log(a, 0.0), mpmath.log(mpmath.mpf(a)), rel=5e-27,
                    abs_tol=1e-28)


@given(st.floats(min_value=-640.0, max_value=700.0))
@settings(max_examples=200)
def test_exp_cosh(a):
    # below about -640 the low word of exp underflows to subnormal; the
    # package only ever exponentiates arguments of modest magnitude
    assert_close_dd(dd.dd_exp(a, 0.0), mpmath.exp(mpmath.mpf(a)), rel=5e-27)
    assert_close_dd(dd.dd_cosh(a, 0.0), mpmath.cosh(mpmath.mpf(a)), rel=5e-27)


def test_exp_edge_cases():
    assert dd.dd_exp(-800.0, 0.0) == (0.0, 0.0)
    with pytest.raises(OverflowError):
        dd.dd_exp(710.0, 0.0)
    with pytest.raises(ValueError):
        dd.dd_log(-1.0, 0.0)


def test_cancellation_is_captured():
    # (1 + 2^-80) - 1 is invisible in double, exact in double-double
    one_plus = dd.dd_add(1.0, 0.0, 2.0 ** -80, 0.0)
    diff = dd.dd_sub(*one_plus, 1.0, 0.0)
    assert to_mp(*diff) == mpmath.mpf(2) ** -80


def test_wrapper_algebra():
    x = dd.DoubleDouble(0.1) + dd.DoubleDouble(0.2)
    assert abs(float(x - 0.30000000000000004)) < 1e-16
    y = dd.DoubleDouble(2.0).sqrt()
    assert_close_dd((y.hi, y.lo), mpmath.sqrt(2))
    assert dd.DoubleDouble(1.0, 1e-20) > 1.0
    assert dd.DoubleDouble(1.0) == 1.0
    assert -dd.DoubleDouble(3.0) < 0.0
    assert float(abs(dd.DoubleDouble(-5.0))) == 5.0


def test_normalization():
    # constructor renormalizes arbitrary hi/lo pairs
    x = dd.DoubleDouble(1e16, 1.0)
    assert abs(x.lo) <= 0.5 * math.ulp(x.hi)


def test_sum_array_compensates():
    hi = np.full(10_000, 0.1)
    lo = np.zeros(10_000)
    shi, slo = dd.dd_sum_array(hi, lo)
    exact = mpmath.mpf(0.1) * 10_000
    assert abs(to_mp(shi, slo) - exact) < 1e-28


def test_ldexp_exact():
    assert dd.dd_ldexp(3.0, 1e-20, 10) == (3072.0, 1e-20 * 1024)
