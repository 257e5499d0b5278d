"""Acceptance gate: oracle agreement, deterministic inequalities with zero
violations, and the statistical suite for the eigenvalue-motion bounds at
the stated tolerances and scales."""

import cmath
import json
import math
import os

import mpmath
import numpy as np
import pytest

from hatano.bands import band_rates, band_structure
from hatano.cli import main as cli_main
from hatano.discriminant import disc_coeffs, eval_disc
from hatano.polyroots import _horner_dd, poly_roots
from hatano.potential import DistributionSpec, sample_potential, zero_potential
from hatano.spectrum import (SpectralParams, charpoly_oracle, critical_g,
                             eigvals_g, eigvals_hermitian)
from hatano.transfer import gamma_profile, large_deviation_stats
from hatano.verify import check_last_inequality, check_markov, \
    check_theorem_bounds, rate_table
from conftest import DISTS

SPEC = DistributionSpec.uniform(0.0, 1.0)
N = 60
G_SET = (0.05, 0.10, 0.15)
EPS = 0.15
REALIZATIONS = 200


def hausdorff(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    d1 = max(np.min(np.abs(b - x)) for x in a)
    d2 = max(np.min(np.abs(a - x)) for x in b)
    return max(d1, d2)


@pytest.fixture(scope="session")
def gamma60():
    grid = np.arange(-4.0, 4.0001, 0.02)
    return gamma_profile(SPEC, grid, steps=50_000, replicas=16, seed=7)


@pytest.fixture(scope="session")
def ensemble(gamma60):
    """Per-realization statistics for the n = 60 uniform(0, 1) ensemble."""
    out = []
    for r in range(REALIZATIONS):
        sample = sample_potential(SPEC, N, 1000 + r)
        bs = band_structure(sample)
        lam0 = eigvals_hermitian(sample, bs=bs).real_by_band()
        gam = gamma60.gamma(lam0)
        theorem = []
        for g in G_SET:
            theorem += check_theorem_bounds(sample, g, EPS, gamma60, bs=bs)
        _, fits = rate_table(sample, list(G_SET), gamma60, bs=bs)
        cg = np.array([critical_g(sample, bs, j) for j in range(N)])
        out.append({
            "gam": gam,
            "theorem": theorem,
            "fits": fits,
            "band_rates": band_rates(bs),
            "critical_g": cg,
            "min_eig_gap": float(np.min(np.diff(np.sort(lam0)))),
            "min_root_gap": float(np.min(np.diff(bs.roots))),
        })
    return out


# -- criterion 1: circulant oracle --------------------------------------------

def test_circulant_oracle():
    for n in (4, 8, 16, 32, 64):
        sample = zero_potential(n)
        for g in (0.0, 0.25, 1.0):
            exact = np.array([
                cmath.exp(g + 2j * math.pi * k / n)
                + cmath.exp(-(g + 2j * math.pi * k / n)) for k in range(n)])
            res = eigvals_g(sample, SpectralParams(n, g))
            assert hausdorff(res.eigenvalues, exact) <= 1e-10, (n, g)


# -- criterion 2: Chebyshev oracle --------------------------------------------

def test_chebyshev_oracle():
    E = np.linspace(-2.5, 2.5, 1000)
    with mpmath.workdps(40):
        for n in (4, 16, 64):
            sample = zero_potential(n)
            for x in E:
                ref = 2 * mpmath.chebyt(n, mpmath.mpf(float(x)) / 2)
                got = eval_disc(sample, float(x), "extended").value
                val = got.sign * mpmath.exp(mpmath.mpf(got.logmag)) \
                    if got.sign != 0 else mpmath.mpf(0)
                assert abs(val - ref) <= 1e-12 * abs(ref), (n, x)
    # band edges of the touching Chebyshev bands are 2 cos(k pi / n)
    for n in (16, 64):
        bs = band_structure(zero_potential(n))
        expected = np.sort(2.0 * np.cos(np.pi * np.arange(n + 1) / n))
        got = np.sort(np.concatenate([[bs.left[0]], bs.right]))
        assert np.max(np.abs(got - expected)) <= 1e-10


# -- criterion 3: discriminant identity vs dense oracle -----------------------

def test_discriminant_identity_and_sign():
    kinds = list(DISTS)
    for i in range(50):
        kind = kinds[i % len(kinds)]
        n = 4 + i % 7
        sample = sample_potential(DISTS[kind], n, 4000 + i)
        hi, lo = disc_coeffs(sample).as_pair()
        for g in (0.0, 0.1, 0.5, 1.0):
            target = 2.0 * math.cosh(n * g)
            roots = poly_roots(charpoly_oracle(sample, g).as_pair())
            for z in roots:
                val = _horner_dd(hi, lo, np.array([z.real]),
                                 np.array([z.imag]))[0]
                assert abs(abs(val) - target) <= 1e-8 * target, (i, g, z)
            res = eigvals_g(sample, SpectralParams(n, g))
            assert hausdorff(res.eigenvalues, roots) <= 1e-8, (i, g)


# -- criterion 4: deterministic inequalities, zero violations -----------------

def test_deterministic_inequalities():
    kinds = list(DISTS)
    for i in range(200):
        kind = kinds[i % len(kinds)]
        n = 10 + i % 31
        sample = sample_potential(DISTS[kind], n, 5000 + i)
        bs = band_structure(sample)
        recs = check_last_inequality(sample, points_per_stretch=100, bs=bs)
        bad = [r for r in recs if not r.passed]
        assert not bad, (i, bad[:3])
        lam0 = eigvals_hermitian(sample, bs=bs).real_by_band()
        rec = check_markov(sample, (float(lam0[0]), float(lam0[-1])))
        assert rec.passed, (i, rec)


# -- criteria 5-8, 10: the n = 60 statistical ensemble ------------------------

def test_theorem_reality_and_two_sided(ensemble):
    real = [r for e in ensemble for r in e["theorem"]
            if r.statement_id == "thm1.real" and r.status in ("pass", "fail")]
    assert len(real) > 0
    reality = np.mean([r.passed for r in real])
    assert reality >= 0.95, reality

    # joint two-sided bound per (j, g) record pair, excluding pairs with
    # an inconclusive or skipped side
    by_key = {}
    for e_i, e in enumerate(ensemble):
        for r in e["theorem"]:
            if r.statement_id in ("thm1.upper", "thm1.lower"):
                by_key.setdefault((e_i, r.j, r.g), []).append(r)
    joint = []
    for recs in by_key.values():
        if any(r.status in ("inconclusive", "skipped") for r in recs):
            continue
        joint.append(all(r.passed for r in recs))
    assert len(joint) > 0
    freq = np.mean(joint)
    assert freq >= 0.90, freq


def test_rate_law_fits(ensemble, gamma60):
    slopes, intercepts = [], []
    for e in ensemble:
        for j, fit in e["fits"].items():
            slopes.append(abs(fit.slope + 1.0))
            intercepts.append(abs(fit.intercept
                                  - (fit.records[0].predicted
                                     + fit.records[0].g)))
    assert len(slopes) > 0
    assert np.median(slopes) <= 0.15, np.median(slopes)
    assert np.median(intercepts) <= 0.15, np.median(intercepts)


def test_critical_g_vs_lyapunov(ensemble):
    ok, total = 0, 0
    for e in ensemble:
        for j in range(1, N - 1):
            cg = e["critical_g"][j]
            if not math.isfinite(cg):
                continue
            total += 1
            if cg >= e["gam"][j] - 0.15:
                ok += 1
    assert total > 0
    assert ok / total >= 0.90, ok / total


def test_bandwidth_rate(ensemble):
    dev, upper = [], []
    for e in ensemble:
        rates = e["band_rates"]
        gam = e["gam"]
        finite = np.isfinite(rates)
        dev.extend(np.abs(rates[finite] - gam[finite]))
        upper.extend(rates[finite] > gam[finite] - 0.15)
    assert np.median(dev) <= 0.15, np.median(dev)
    assert np.mean(upper) >= 0.90, np.mean(upper)


def test_spacings(ensemble):
    thr = math.exp(-0.15 * N)
    eig_freq = np.mean([e["min_eig_gap"] > thr for e in ensemble])
    root_freq = np.mean([e["min_root_gap"] > thr for e in ensemble])
    assert eig_freq >= 0.95, eig_freq
    assert root_freq >= 0.95, root_freq


# -- criterion 9: large deviations --------------------------------------------

def test_large_deviations(gamma60):
    gh = float(gamma60.gamma(0.5))
    at60 = large_deviation_stats(SPEC, 0.5, 60, 500, seed=101, gamma_hat=gh)
    at120 = large_deviation_stats(SPEC, 0.5, 120, 500, seed=102, gamma_hat=gh)
    assert at60.tails[0.2] <= 0.05, at60.tails
    assert at120.tails[0.2] <= 0.05, at120.tails
    assert at120.tails[0.2] <= at60.tails[0.2] + 0.02


# -- criterion 11: byte-identical rerun from manifest -------------------------

def test_sweep_reproducible(tmp_path):
    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({
        "spec": {"kind": "uniform", "a": 0.0, "b": 1.0},
        "n": 20, "g_grid": [0.05, 0.1], "epsilon": 0.3,
        "realizations": 3, "seed": 77,
        "lyapunov": {"e_spacing": 0.1, "steps": 5000, "replicas": 4},
        "output_dir": out1,
    }))
    assert cli_main(["sweep", "--config", str(cfgfile)]) == 0
    assert cli_main(["sweep", "--from-manifest",
                     os.path.join(out1, "manifest.json"), "--out", out2]) == 0
    for name in ("gamma.csv", "verify.csv", "rates.csv", "fits.csv",
                 "structure.csv", "summary.json", "flow.csv"):
        a = open(os.path.join(out1, name), "rb").read()
        b = open(os.path.join(out2, name), "rb").read()
        assert a == b, f"{name} differs between identical runs"
