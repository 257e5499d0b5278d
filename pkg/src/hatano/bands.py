"""Band structure of the trace polynomial.

Roots E_j (zeros of Delta_n), turning points E'_j (zeros of Delta_n'),
and the bands B_n^(j) = components of Delta_n^{-1}([-2, 2]).

Band edges are eigenvalues of the periodic (Delta = +2) and antiperiodic
(Delta = -2) ring Hamiltonians: sorting the union of both symmetric
spectra and pairing consecutive entries yields the n bands with a
guaranteed count, which sidesteps the monomial-basis conditioning
problems of coefficient-level root finding near the spectral edge. Roots
and turning points then come from bisection of the scaled pointwise
evaluations inside bands and gaps, escalated to double-double whenever a
width falls below double resolution.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .dd import DoubleDouble
from .discriminant import dd_trace_minus_target
from .errors import StructureViolation
from .rootfind import bisect_batch
from .scaled import ScaledReal

LN2 = math.log(2.0)
# band widths below this are re-refined in double-double
EXTENDED_WIDTH = 1e-12


def spectral_interval(sample):
    """K = [-2 - bound - 1, 2 + bound + 1], containing all spectra."""
    b = sample.spec.bound
    return (-2.0 - b - 1.0, 2.0 + b + 1.0)


def ring_hamiltonian(sample, corner=1.0):
    """Symmetric ring matrix whose eigenvalues solve Delta = 2 * corner."""
    n = sample.n
    H = (np.diag(np.asarray(sample.values, dtype=float))
         + np.diag(np.ones(n - 1), 1) + np.diag(np.ones(n - 1), -1))
    H[0, -1] += corner
    H[-1, 0] += corner
    return H


@dataclass(frozen=True)
class BandStructure:
    sample: object
    roots: np.ndarray           # E_1 < ... < E_n
    turning_points: np.ndarray  # E'_1 <= ... <= E'_{n-1}
    tp_sign: np.ndarray         # sign of Delta at each turning point
    tp_logmag: np.ndarray       # log|Delta(E'_j)|
    left: np.ndarray            # band left edges
    right: np.ndarray           # band right edges
    logwidths: np.ndarray       # log band widths, kept beyond double ulp

    @property
    def n(self):
        return len(self.roots)

    @property
    def bands(self):
        return [(float(l), float(r)) for l, r in zip(self.left, self.right)]

    @property
    def widths(self):
        return np.exp(self.logwidths)

    def to_csv(self, path):
        """Frozen schema: j,E_j,left,right,width,logwidth,tp_logmag."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["j", "E_j", "left", "right", "width", "logwidth",
                        "tp_logmag"])
            for j in range(self.n):
                width = float(np.exp(self.logwidths[j]))
                logw = repr(float(self.logwidths[j])) if width > 0.0 else "-inf"
                tp = repr(float(self.tp_logmag[j])) if j < self.n - 1 else ""
                w.writerow([j + 1, repr(float(self.roots[j])),
                            repr(float(self.left[j])), repr(float(self.right[j])),
                            repr(width), logw, tp])


def _sign_disc_minus(values, E_arr, s_arr, log_target):
    """Sign of Delta(E) - target, target = s_arr * exp(log_target), per entry.

    Pure sign arithmetic in log scale, no exponentials materialized.
    """
    sign, logmag, _ = kernels.disc_trace_grid(values, np.asarray(E_arr, dtype=float))
    sign = sign.astype(np.int64)
    s_arr = np.broadcast_to(np.asarray(s_arr, dtype=np.int64), sign.shape)
    out = -s_arr.copy()
    same = sign == s_arr
    out[same] = s_arr[same] * np.sign(logmag[same] - log_target).astype(np.int64)
    return out


def _refine_edge_dd(sample, lo, hi, slo, target_sign, iters=160):
    """Double-double bisection of Delta = 2 * target_sign on [lo, hi]."""
    lo = DoubleDouble.from_float(lo)
    hi = DoubleDouble.from_float(hi)
    target = DoubleDouble.from_float(2.0 * target_sign)
    for _ in range(iters):
        mid = (lo + hi) * 0.5
        if mid == lo or mid == hi:
            break
        diff, _ = dd_trace_minus_target(sample, mid, target)
        if diff.hi > 0 or (diff.hi == 0 and diff.lo > 0):
            s = 1
        elif diff.hi < 0 or (diff.hi == 0 and diff.lo < 0):
            s = -1
        else:
            return mid
        if s == slo:
            lo = mid
        else:
            hi = mid
    return (lo + hi) * 0.5


def _gap_logdiff(sample, tp, s):
    """log(|Delta(E'_j)| - 2) in double-double; -inf for a closed gap."""
    diff, twos = dd_trace_minus_target(sample, float(tp),
                                       DoubleDouble.from_float(2.0 * s))
    mag = abs(diff)
    if mag.hi == 0.0:
        return -math.inf
    return math.log(mag.hi) + math.log1p(mag.lo / mag.hi) + twos * LN2


def band_structure(sample, precision="standard") -> BandStructure:
    n = sample.n
    values = np.ascontiguousarray(sample.values)
    per = np.linalg.eigvalsh(ring_hamiltonian(sample, 1.0))
    anti = np.linalg.eigvalsh(ring_hamiltonian(sample, -1.0))
    edges = np.sort(np.concatenate([per, anti]))
    K0, K1 = spectral_interval(sample)

    j = np.arange(n)
    s_above = ((-1) ** (n - 1 - j)).astype(np.int64)  # sign of Delta above band j
    s_below = -s_above                                # sign of Delta below band j

    # Root brackets from gap midpoints: |Delta| >= 2 there with the
    # alternating gap sign, so the brackets are valid even when eigvalsh
    # cannot resolve an exponentially narrow band or gap.
    gap_mid = 0.5 * (edges[1:-1:2] + edges[2::2])
    lo = np.concatenate([[K0], gap_mid])
    hi = np.concatenate([gap_mid, [K1]])
    roots = bisect_batch(
        lambda E: kernels.disc_trace_grid(values, E)[0].astype(np.int64),
        lo, hi, s_below, iters=64)
    if np.any(np.diff(roots) <= 0):
        raise StructureViolation("roots not strictly increasing",
                                 diagnostics={"roots": roots, "edges": edges})

    # exactly one turning point between consecutive roots (Rolle); Delta'
    # has sign s_above[j] at root j and the opposite sign at root j+1
    tp = bisect_batch(
        lambda E: kernels.disc_trace_deriv_grid(values, E)[2].astype(np.int64),
        roots[:-1], roots[1:], s_above[:-1], iters=64)
    tp_sign = s_above[:-1].copy()

    _, tp_logmag, _ = kernels.disc_trace_grid(values, tp)
    # near-touching magnitudes are cancellation-prone in the plain kernel:
    # measure |Delta(E')| - 2 itself in double-double
    near = np.abs(tp_logmag - LN2) < 1e-6
    touch = np.zeros(max(n - 1, 0), dtype=bool)
    for i in np.nonzero(near)[0]:
        ld = _gap_logdiff(sample, tp[i], int(tp_sign[i]))
        if ld <= -60.0:           # |Delta| - 2 below extended capability
            touch[i] = True
            tp_logmag[i] = LN2
        else:
            tp_logmag[i] = LN2 + math.log1p(0.5 * math.exp(ld))
    if np.any(tp_logmag < LN2 - 1e-9):
        raise StructureViolation(
            "turning-point magnitude below 2",
            diagnostics={"tp": tp, "tp_logmag": tp_logmag})

    # band edges by bisection of |Delta| = 2 on [turning point, root]
    out_lo = np.concatenate([[K0], tp])
    out_hi = np.concatenate([tp, [K1]])
    left = bisect_batch(
        lambda E: _sign_disc_minus(values, E, s_below, LN2),
        out_lo, roots, s_below, iters=64)
    right = bisect_batch(
        lambda E: _sign_disc_minus(values, E, s_above, LN2),
        roots, out_hi, -s_above, iters=64)
    # closed gaps share the turning point as their common edge
    for i in np.nonzero(touch)[0]:
        right[i] = tp[i]
        left[i + 1] = tp[i]

    # escalate to double-double bisection where double resolution is not
    # enough: sub-double band widths, near-touching gaps, or on request
    with np.errstate(divide="ignore"):
        logwidths = np.log(np.maximum(right - left, 0.0))
    for i in range(n):
        need_lo = (i > 0 and near[i - 1] and not touch[i - 1])
        need_hi = (i < n - 1 and near[i] and not touch[i])
        if precision == "extended" or right[i] - left[i] < EXTENDED_WIDTH:
            need_lo = not (i > 0 and touch[i - 1])
            need_hi = not (i < n - 1 and touch[i])
        if not (need_lo or need_hi):
            continue
        lo_dd = DoubleDouble.from_float(left[i])
        hi_dd = DoubleDouble.from_float(right[i])
        if need_lo:
            lo_dd = _refine_edge_dd(
                sample, out_lo[i], roots[i], int(s_below[i]), int(s_below[i]))
            left[i] = float(lo_dd)
        if need_hi:
            hi_dd = _refine_edge_dd(
                sample, roots[i], out_hi[i], -int(s_above[i]), int(s_above[i]))
            right[i] = float(hi_dd)
        w = float(hi_dd - lo_dd)
        logwidths[i] = math.log(w) if w > 0.0 else -math.inf

    bs = BandStructure(sample=sample, roots=roots, turning_points=tp,
                       tp_sign=tp_sign, tp_logmag=np.asarray(tp_logmag),
                       left=left, right=right, logwidths=logwidths)
    _validate(bs)
    return bs


def _validate(bs: BandStructure):
    n = bs.n
    d = {}
    ok = True
    # interlacing: E'_{j-1} < E_j < E'_j strictly for inner roots
    if n > 2:
        if not (np.all(bs.turning_points[:-1] < bs.roots[1:-1])
                and np.all(bs.roots[1:-1] < bs.turning_points[1:])):
            ok = False
            d["interlacing"] = (bs.roots, bs.turning_points)
    # each band contains its root (ulp slack: sub-double-width bands round
    # both edges to the same float)
    tol = 4e-15 * (1.0 + np.abs(bs.roots))
    if not np.all((bs.left <= bs.roots + tol) & (bs.roots <= bs.right + tol)):
        ok = False
        d["root_in_band"] = (bs.left, bs.roots, bs.right)
    # disjoint interiors
    if n > 1 and np.any(bs.right[:-1] > bs.left[1:] + 1e-12):
        ok = False
        d["overlap"] = (bs.right[:-1], bs.left[1:])
    if not ok:
        raise StructureViolation("band structure validation failed",
                                 diagnostics=d)


def bandwidths(bs: BandStructure):
    """Widths |B_n^(j)| per band."""
    return bs.widths


def band_rates(bs: BandStructure):
    """-(1/n) log|B_n^(j)| per band (inf for touching zero-width bands)."""
    return -bs.logwidths / bs.n


def spacing_stats(sample):
    """Minimum eigenvalue gap (g = 0) and minimum root gap."""
    from .spectrum import eigvals_hermitian

    lam = np.sort(np.real(eigvals_hermitian(sample).eigenvalues))
    bs = band_structure(sample)
    min_eig = float(np.min(np.diff(lam))) if len(lam) > 1 else math.inf
    min_root = float(np.min(np.diff(bs.roots))) if bs.n > 1 else math.inf
    return {"min_eig_gap": min_eig, "min_root_gap": min_root}


def turning_point_magnitudes(bs: BandStructure):
    """|Delta_n(E'_j)| as ScaledReals (these cap eigenvalue reality in g)."""
    return [ScaledReal(1, float(lm)) for lm in bs.tp_logmag]
