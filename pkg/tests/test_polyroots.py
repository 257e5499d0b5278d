"""Simultaneous root finding on double-double coefficients."""

import numpy as np
import pytest

from hatano.dd import DoubleDouble
from hatano.polyroots import poly_roots


def dd_poly_from_roots(roots):
    """Monic coefficients (constant first) built exactly in double-double."""
    coeffs = [DoubleDouble.from_float(1.0)]
    for r in roots:
        r = DoubleDouble.from_float(float(r))
        coeffs = ([DoubleDouble.from_float(0.0)] + coeffs[:])
        for k in range(len(coeffs) - 1):
            coeffs[k] = coeffs[k] - r * coeffs[k + 1]
    return coeffs


def match(found, expected, tol):
    found = np.sort_complex(np.asarray(found, dtype=complex))
    expected = np.sort_complex(np.asarray(expected, dtype=complex))
    assert len(found) == len(expected)
    assert np.max(np.abs(found - expected)) < tol


def test_quadratic_and_linear():
    match(poly_roots([6.0, -5.0, 1.0]), [2.0, 3.0], 1e-12)
    match(poly_roots([-4.0, 2.0]), [2.0], 1e-14)
    with pytest.raises(ValueError):
        poly_roots([1.0])
    with pytest.raises(ValueError):
        poly_roots([1.0, 2.0, 0.0])


def test_complex_conjugate_pairs():
    # (x^2 + 1)(x^2 - 2x + 5): roots +-i, 1 +- 2i
    match(poly_roots([5.0, -2.0, 6.0, -2.0, 1.0]),
          [1j, -1j, 1 + 2j, 1 - 2j], 1e-10)
    z = poly_roots([5.0, -2.0, 6.0, -2.0, 1.0])
    # conjugate symmetry is exact, not approximate
    upper = z[z.imag > 0]
    lower = z[z.imag < 0]
    assert np.all(np.sort_complex(np.conj(lower)) == np.sort_complex(upper))


@pytest.mark.parametrize("deg", [8, 16, 32, 64])
def test_jittered_real_grids(deg):
    rng = np.random.Generator(np.random.Philox(deg))
    roots = np.sort(np.linspace(-2.0, 2.0, deg)
                    + 0.1 * rng.standard_normal(deg))
    found = poly_roots(dd_poly_from_roots(roots))
    assert np.max(np.abs(found.imag)) < 1e-9
    match(found, roots, 1e-8 * deg)


@pytest.mark.parametrize("gap", [1e-3, 1e-6])
def test_close_real_pairs(gap):
    # pairs separated by down to 1e-6 among well-spread companions, deg <= 32
    base = np.linspace(-1.5, 1.5, 14)
    roots = np.sort(np.concatenate([base, base[3:6] + gap]))
    found = poly_roots(dd_poly_from_roots(roots))
    match(found, roots, 0.3 * gap)


def test_chebyshev_nodes_degree_24():
    # roots of 2 T_n(x/2): the zero-potential trace polynomial
    n = 24
    roots = 2.0 * np.cos((2 * np.arange(n) + 1) * np.pi / (2 * n))
    found = poly_roots(dd_poly_from_roots(np.sort(roots)))
    match(found, np.sort(roots), 1e-10)


def test_wide_dynamic_range_coefficients():
    roots = np.array([-200.0, -3.0, 0.5, 40.0])
    found = poly_roots(dd_poly_from_roots(roots))
    match(found, np.sort(roots), 1e-9)


def test_accepts_hi_lo_pair_input():
    cs = dd_poly_from_roots([1.0, 2.0, 3.0])
    hi = np.array([c.hi for c in cs])
    lo = np.array([c.lo for c in cs])
    match(poly_roots((hi, lo)), [1.0, 2.0, 3.0], 1e-12)


def test_roots_at_origin_deflated():
    # zero low-order coefficients (exact roots at 0) must not break the
    # starting-radius construction
    found = poly_roots((np.array([0.0, 2.0, -3.0, 1.0]), np.zeros(4)))
    match(found, [0.0, 1.0, 2.0], 1e-12)
    found = poly_roots((np.array([-0.0, 0.0, 0.0, 1.0]), np.zeros(4)))
    match(found, [0.0, 0.0, 0.0], 1e-12)
