"""Trace polynomial: coefficient expansion vs pointwise products vs exact
rational arithmetic."""

import math
from fractions import Fraction

import numpy as np
import pytest

from hatano.dd import DoubleDouble
from hatano.discriminant import (chebyshev_disc, dd_trace_minus_target,
                                 disc_coeffs, eval_disc, eval_disc_deriv)
from hatano.errors import CapabilityExceeded
from hatano.potential import DistributionSpec, sample_potential, zero_potential
from conftest import random_sample


def exact_disc_coeffs(values):
    """Delta_n coefficients by Fraction polynomial transfer products."""
    # polynomials as coefficient lists, constant first
    def shift(p):  # multiply by E
        return [Fraction(0)] + p

    def sub(p, q):
        m = max(len(p), len(q))
        p = p + [Fraction(0)] * (m - len(p))
        q = q + [Fraction(0)] * (m - len(q))
        return [a - b for a, b in zip(p, q)]

    def scale(p, c):
        return [a * c for a in p]

    a, b = [Fraction(1)], [Fraction(0)]
    c, d = [Fraction(0)], [Fraction(1)]
    for v in values:
        fv = Fraction(float(v))
        na = sub(sub(shift(a), scale(a, fv)), c)
        nb = sub(sub(shift(b), scale(b, fv)), d)
        c, d = a, b
        a, b = na, nb
    m = max(len(a), len(d))
    a = a + [Fraction(0)] * (m - len(a))
    d = d + [Fraction(0)] * (m - len(d))
    return [x + y for x, y in zip(a, d)]


@pytest.mark.parametrize("kind,n,seed", [
    ("uniform", 2, 0), ("uniform", 5, 1), ("uniform", 9, 2),
    ("bernoulli", 7, 3), ("discrete", 8, 4),
])
def test_coeffs_match_exact_rational(kind, n, seed):
    sample = random_sample(kind, n, seed)
    exact = exact_disc_coeffs(sample.values)
    dc = disc_coeffs(sample)
    assert dc.degree == n
    for k, ck in enumerate(exact):
        got = Fraction(float(dc.hi[k])) + Fraction(float(dc.lo[k]))
        scale = max(abs(ck), Fraction(1))
        assert abs(got - ck) <= Fraction(1, 10**28) * scale


def test_zero_potential_is_chebyshev():
    # Delta_n(E) = 2 T_n(E/2)
    for n in (1, 2, 3, 8, 33):
        E = np.linspace(-2.5, 2.5, 101)
        for x in E:
            ref = 2.0 * math.cos(n * math.acos(x / 2.0)) if abs(x) <= 2.0 \
                else 2.0 * math.cosh(n * math.acosh(abs(x) / 2.0)) * (
                    1.0 if x > 0 else (-1.0) ** n)
            assert chebyshev_disc(n, x) == pytest.approx(ref, rel=1e-11,
                                                         abs=1e-11)


def test_eval_disc_matches_coeffs_and_chebyshev():
    sample = zero_potential(12)
    for x in np.linspace(-2.4, 2.4, 41):
        val = eval_disc(sample, x).value.to_float()
        assert val == pytest.approx(chebyshev_disc(12, x), rel=1e-12,
                                    abs=1e-12)


@pytest.mark.parametrize("kind,n,seed", [
    ("uniform", 16, 5), ("bernoulli", 24, 6), ("uniform01", 40, 7),
])
def test_standard_vs_extended_pointwise(kind, n, seed):
    sample = random_sample(kind, n, seed)
    for x in np.linspace(-3.0, 3.5, 37):
        std = eval_disc(sample, x, "standard").value
        ext = eval_disc(sample, x, "extended").value
        assert std.sign == ext.sign
        if ext.sign != 0:
            # log magnitudes agree to double rounding across e^{+-gamma n}
            assert std.logmag == pytest.approx(ext.logmag, abs=1e-9)


def test_derivative_matches_coefficient_derivative():
    sample = random_sample("uniform", 10, 8)
    dc = disc_coeffs(sample)
    k = np.arange(1, len(dc.hi))
    dhi, dlo = dc.hi[1:] * k, dc.lo[1:] * k
    for x in (-1.7, -0.3, 0.9, 2.2):
        ev = eval_disc_deriv(sample, x, "extended")
        ref_p = float(dc.eval_dd(x))
        phi, plo = dhi[-1], dlo[-1]
        for j in range(len(dhi) - 2, -1, -1):
            acc = DoubleDouble(phi, plo) * x + DoubleDouble(dhi[j], dlo[j])
            phi, plo = acc.hi, acc.lo
        ref_dp = phi + plo
        assert ev.value.to_float() == pytest.approx(ref_p, rel=1e-10)
        assert ev.derivative.to_float() == pytest.approx(ref_dp, rel=1e-10)


def test_trace_minus_target_scaling():
    sample = random_sample("uniform", 30, 9)
    target = DoubleDouble.from_float(2.0)
    diff, twos = dd_trace_minus_target(sample, 1.234, target)
    ev = eval_disc(sample, 1.234, "extended").value
    rebuilt = (float(diff) + math.ldexp(2.0, -twos)) * 2.0 ** twos
    assert rebuilt == pytest.approx(ev.sign * math.exp(ev.logmag), rel=1e-12)


def test_coefficient_capability_limit():
    sample = sample_potential(DistributionSpec.constant(0.0), 300, seed=0)
    with pytest.raises(CapabilityExceeded):
        disc_coeffs(sample)


def test_with_constant_shifted():
    sample = random_sample("uniform", 6, 10)
    dc = disc_coeffs(sample)
    shifted = dc.with_constant_shifted(DoubleDouble.from_float(-2.0))
    for x in (-1.0, 0.5, 2.0):
        assert float(shifted.eval_dd(x)) == pytest.approx(
            float(dc.eval_dd(x)) - 2.0, rel=1e-13, abs=1e-13)
