"""Band structure: roots, turning points, edges and their invariants."""

import math

import numpy as np
import pytest

from hatano.bands import (band_rates, band_structure, spacing_stats,
                          spectral_interval, turning_point_magnitudes)
from hatano.discriminant import chebyshev_disc, eval_disc, eval_disc_deriv
from hatano.potential import DistributionSpec, sample_potential, zero_potential
from conftest import DISTS, random_sample

CASES = [(kind, n, seed)
         for kind in DISTS
         for seed, n in enumerate((2, 3, 5, 8, 13, 21, 34, 64))]


@pytest.mark.parametrize("kind,n,seed", CASES)
def test_structure_invariants(kind, n, seed):
    sample = random_sample(kind, n, seed)
    bs = band_structure(sample)
    assert bs.n == n
    assert len(bs.turning_points) == n - 1
    # strict ordering and interlacing with the turning points
    assert np.all(np.diff(bs.roots) > 0)
    if n > 2:
        assert np.all(bs.turning_points[:-1] < bs.roots[1:-1])
        assert np.all(bs.roots[1:-1] < bs.turning_points[1:])
    # each root inside its band, bands disjoint, all inside K
    tol = 4e-15 * (1.0 + np.abs(bs.roots))
    assert np.all(bs.left <= bs.roots + tol)
    assert np.all(bs.roots <= bs.right + tol)
    assert np.all(bs.right[:-1] <= bs.left[1:] + 1e-12)
    K0, K1 = spectral_interval(sample)
    assert K0 <= bs.left[0] and bs.right[-1] <= K1
    # |Delta| = 2 at every edge, up to the rounding of the edge to a
    # float times the local slope (huge near exponentially narrow bands)
    for e in np.concatenate([bs.left, bs.right]):
        ev = eval_disc_deriv(sample, float(e), "extended")
        mag = math.exp(ev.value.logmag) if ev.value.sign != 0 else 0.0
        dmag = (math.exp(ev.derivative.logmag)
                if ev.derivative.sign != 0 else 0.0)
        spacing = max(math.ulp(abs(float(e))), 1e-16)
        assert abs(mag - 2.0) <= 16.0 * dmag * spacing + 1e-9
    # |Delta| >= 2 at turning points
    assert np.all(bs.tp_logmag >= math.log(2.0) - 1e-12)
    # roots solve Delta = 0 up to float rounding times the local slope
    for r in bs.roots:
        ev = eval_disc_deriv(sample, float(r), "extended")
        if ev.value.sign == 0:
            continue
        dlog = (ev.derivative.logmag if ev.derivative.sign != 0
                else -math.inf)
        spacing = max(math.ulp(abs(float(r))), 1e-16)
        assert ev.value.logmag <= dlog + math.log(16.0 * spacing)


@pytest.mark.parametrize("n", [2, 3, 6, 10, 24, 48])
def test_zero_potential_edges_are_chebyshev_nodes(n):
    # Delta_n = 2 T_n(E/2): bands touch and the edges are 2 cos(k pi / n)
    bs = band_structure(zero_potential(n))
    expected = np.sort(2.0 * np.cos(np.pi * np.arange(n + 1) / n))
    got = np.sort(np.concatenate([[bs.left[0]], bs.right]))
    assert np.allclose(got, expected, atol=1e-10)
    # inner edges are shared (touching bands) and turning points sit on them
    assert np.allclose(bs.right[:-1], bs.left[1:], atol=1e-12)
    assert np.all(bs.tp_logmag == pytest.approx(math.log(2.0), abs=1e-12))
    # roots of 2 T_n(E/2) are 2 cos((2k-1) pi / (2n))
    ref_roots = np.sort(2.0 * np.cos((2 * np.arange(1, n + 1) - 1)
                                     * np.pi / (2 * n)))
    assert np.allclose(bs.roots, ref_roots, atol=1e-10)


def test_chebyshev_disc_reference():
    for n in (2, 7, 16):
        for x in np.linspace(-1.9, 1.9, 23):
            assert chebyshev_disc(n, x) == pytest.approx(
                2.0 * math.cos(n * math.acos(x / 2.0)), abs=1e-12)


def test_two_site_hand_computed():
    # v = (0, 1): Delta_2(E) = E(E - 1) - 2, roots (1 +- 3)/2 = -1, 2
    from hatano.potential import GENERATOR_ID, PotentialSample

    spec = DistributionSpec.discrete([0.0, 1.0], [0.5, 0.5])
    sample = PotentialSample(n=2, spec=spec, seed=0, generator_id=GENERATOR_ID,
                             values=np.array([0.0, 1.0]))
    bs = band_structure(sample)
    assert bs.roots == pytest.approx([-1.0, 2.0], abs=1e-12)
    # turning point at the vertex E = 1/2, Delta(1/2) = -9/4
    assert bs.turning_points == pytest.approx([0.5], abs=1e-12)
    assert bs.tp_logmag[0] == pytest.approx(math.log(9.0 / 4.0), abs=1e-12)
    assert bs.tp_sign[0] == -1


def test_band_rates_and_tp_magnitudes():
    sample = random_sample("uniform01", 40, 123)
    bs = band_structure(sample)
    rates = band_rates(bs)
    assert np.all(rates > 0)  # every band is narrower than 1 here
    assert rates == pytest.approx(-bs.logwidths / 40.0)
    mags = turning_point_magnitudes(bs)
    assert len(mags) == 39
    for m, lm in zip(mags, bs.tp_logmag):
        assert m.sign == 1 and m.logmag == float(lm)


def test_extended_precision_consistent():
    sample = random_sample("uniform", 24, 7)
    std = band_structure(sample, "standard")
    ext = band_structure(sample, "extended")
    assert np.allclose(std.roots, ext.roots, atol=1e-13)
    assert np.allclose(std.left, ext.left, atol=1e-12)
    assert np.allclose(std.right, ext.right, atol=1e-12)
    # log widths agree wherever the width is comfortably above double ulp
    wide = std.logwidths > -20.0
    assert np.allclose(std.logwidths[wide], ext.logwidths[wide], atol=1e-6)


def test_narrow_bands_resolved_beyond_double():
    # at n = 64 the narrowest bands are far below double ulp; the log
    # widths must still be finite and ordered sensibly
    sample = random_sample("bernoulli", 64, 11)
    bs = band_structure(sample)
    rates = band_rates(bs)
    assert np.all(np.isfinite(bs.logwidths))
    assert np.max(rates) > 0.2  # exponentially narrow edge bands exist
    # widths from logwidths match edge differences where resolvable
    res = (bs.right - bs.left) > 1e-10
    assert np.allclose(np.exp(bs.logwidths[res]), (bs.right - bs.left)[res],
                       rtol=1e-6)


def test_to_csv_schema(tmp_path):
    import csv

    sample = random_sample("uniform", 6, 3)
    bs = band_structure(sample)
    path = tmp_path / "bands.csv"
    bs.to_csv(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["j", "E_j", "left", "right", "width", "logwidth",
                       "tp_logmag"]
    assert len(rows) == 7
    assert rows[1][0] == "1" and rows[6][0] == "6"
    assert float(rows[1][1]) == bs.roots[0]
    assert rows[6][6] == ""  # no turning point after the last band


def test_spacing_stats():
    sample = random_sample("uniform", 30, 17)
    st = spacing_stats(sample)
    assert st["min_eig_gap"] > 0
    assert st["min_root_gap"] > 0
    bs = band_structure(sample)
    assert st["min_root_gap"] == pytest.approx(float(np.min(np.diff(bs.roots))))
