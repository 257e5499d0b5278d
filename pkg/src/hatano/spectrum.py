"""Eigenvalues of the asymmetric-hopping ring operator H_n(g).

The eigenvalue equation is Delta_n(z) = 2 cosh(n g) (sign convention
verified against the dense characteristic-polynomial oracle; see
charpoly_oracle). Real eigenvalues come from bisection on the monotone
stretches of Delta_n, the complex ones from the simultaneous root finder
applied to the shifted coefficient form; ``precision="extended"`` adds a
double-double Newton polish so that eigenvalue displacements of order
e^{-(gamma - g) n} stay resolvable.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .bands import BandStructure, band_structure, spectral_interval
from .dd import DoubleDouble, dd_cosh, dd_ldexp, dd_mul_d
from .discriminant import disc_coeffs, _dd_trace_deriv
from .errors import (CapabilityExceeded, ContinuityBreak, CountMismatch,
                     InvalidSpec)
from .polyroots import _horner_dd
from .scaled import ScaledReal

LN2 = math.log(2.0)
NG_MAX = 700.0


@dataclass(frozen=True)
class SpectralParams:
    """Ring length and non-Hermiticity g >= 0; target = 2 cosh(n g)."""

    n: int
    g: float

    def __post_init__(self):
        if self.g < 0.0:
            raise InvalidSpec(f"g must be >= 0, got {self.g}")
        if self.n * self.g > NG_MAX:
            raise CapabilityExceeded(
                f"n*g = {self.n * self.g} exceeds the overflow-safe limit {NG_MAX}")

    @property
    def log_target(self):
        """log(2 cosh(n g)) = n g + log(1 + e^{-2 n g})."""
        ng = self.n * self.g
        return ng + math.log1p(math.exp(-2.0 * ng))

    @property
    def target(self) -> ScaledReal:
        return ScaledReal(1, self.log_target)

    @property
    def target_dd(self) -> DoubleDouble:
        ng = dd_mul_d(float(self.g), 0.0, float(self.n))
        return DoubleDouble._raw(*dd_ldexp(*dd_cosh(*ng), 1))


@dataclass(frozen=True)
class SpectrumResult:
    """Eigenvalues sorted by (Re, Im); labels give the band index of each
    real eigenvalue and -1 for members of complex pairs."""

    eigenvalues: np.ndarray
    is_real: np.ndarray
    labels: np.ndarray
    params: SpectralParams

    @property
    def n(self):
        return len(self.eigenvalues)

    @property
    def index_map(self):
        """band index -> real eigenvalue."""
        return {int(j): complex(z).real
                for j, z in zip(self.labels, self.eigenvalues) if j >= 0}

    def real_by_band(self):
        out = np.full(self.n, np.nan)
        for j, z in zip(self.labels, self.eigenvalues):
            if j >= 0:
                out[j] = z.real
        return out


def _positive_end_logmag(bs: BandStructure, s_above):
    """log|Delta| at the positive end of each monotone stretch (+inf for
    the unbounded tails)."""
    n = bs.n
    m = np.full(n, np.inf)
    for j in range(n):
        if s_above[j] > 0:
            if j < n - 1:
                m[j] = bs.tp_logmag[j]
        else:
            if j > 0:
                m[j] = bs.tp_logmag[j - 1]
    return m


def _stretch_sign_above(n):
    j = np.arange(n)
    return ((-1) ** (n - 1 - j)).astype(np.int64)


def _dd_newton_real(sample, x0, target: DoubleDouble, iters=3):
    """Double-double Newton on Delta(E) = target from a double seed."""
    E = DoubleDouble.from_float(float(x0))
    for _ in range(iters):
        tr, dtr, twos = _dd_trace_deriv(sample.values, E)
        t_scaled = DoubleDouble._raw(*dd_ldexp(target.hi, target.lo, -twos))
        f = tr - t_scaled
        if dtr.hi == 0.0 and dtr.lo == 0.0:
            break
        step = f / dtr
        if abs(float(step)) > 1e-3 * (1.0 + abs(float(E))):
            break
        E = E - step
    return E


def _sign_abs_disc_minus(values, E_arr, s_arr, log_target):
    """Sign of Delta(E) - s * exp(log_target), vectorized per entry."""
    sign, logmag, _ = kernels.disc_trace_grid(values, np.asarray(E_arr, dtype=float))
    sign = sign.astype(np.int64)
    s_arr = np.broadcast_to(np.asarray(s_arr, dtype=np.int64), sign.shape)
    out = -s_arr.copy()
    same = sign == s_arr
    out[same] = s_arr[same] * np.sign(logmag[same] - log_target).astype(np.int64)
    return out


def _bisect_stretches(sample, bs, idx, s_above, params, iters=64):
    """One real solution of Delta = 2cosh(ng) per solvable stretch."""
    from .rootfind import bisect_batch

    n = sample.n
    log_t = params.log_target
    values = np.ascontiguousarray(sample.values)
    K0, K1 = spectral_interval(sample)
    # outer brackets must cover the g-dependent spectral radius
    K1 = max(K1, 2.0 * math.cosh(params.g) + sample.spec.bound + 1.0)
    K0 = min(K0, -K1)
    lo = np.array([bs.turning_points[j - 1] if j > 0 else K0 for j in idx])
    hi = np.array([bs.turning_points[j] if j < n - 1 else K1 for j in idx])
    s_lo = -s_above[idx]
    # f = Delta - t has sign s_lo at the stretch's lower end
    return bisect_batch(
        lambda E: _sign_abs_disc_minus(values, E, 1, log_t),
        lo, hi, s_lo, iters=iters)


def dense_matrix(sample, g):
    """The n x n ring matrix of H_n(g) (e^{-g} left hops, e^{+g} right)."""
    n = sample.n
    H = np.diag(np.asarray(sample.values, dtype=float))
    eg, eginv = math.exp(g), math.exp(-g)
    for k in range(n):
        H[k, (k - 1) % n] += eginv
        H[k, (k + 1) % n] += eg
    return H


def _newton_complex_dd(shifted, z, iters=6):
    """Complex Newton with double-double coefficient evaluation."""
    chi, clo = shifted.as_pair()
    k = np.arange(1, len(chi))
    dhi, dlo = chi[1:] * k, clo[1:] * k
    z = np.array(z, dtype=complex)
    for _ in range(iters):
        p = _horner_dd(chi, clo, z.real, z.imag)
        dp = _horner_dd(dhi, dlo, z.real, z.imag)
        step = np.where(dp == 0.0, 0.0, p / np.where(dp == 0.0, 1.0, dp))
        ok = np.abs(step) < 0.1 * (1.0 + np.abs(z))
        z = np.where(ok, z - step, z)
    return z


def _complex_eigs(sample, params, n_complex, bs, m_plus):
    """The non-real eigenvalues: LAPACK seeds on the dense matrix, then a
    double-double Newton polish of Delta(z) = 2cosh(ng).

    The coefficient-level simultaneous solver is not used here: near the
    spectral edge the monomial-basis representation is too ill-conditioned
    and turns real edge roots into spurious complex pseudozeros. LAPACK on
    the dense matrix is backward stable, and the complex eigenvalues are
    well enough conditioned that its output lands inside the Newton basin.
    """
    n = sample.n
    shifted = disc_coeffs(sample).with_constant_shifted(-params.target_dd)
    seeds = np.linalg.eigvals(dense_matrix(sample, params.g))
    cand = seeds[np.abs(seeds.imag) > 1e-10 * (1.0 + np.abs(seeds.real))]
    z = _newton_complex_dd(shifted, cand)
    # polished points that fell back onto the axis were really real roots
    z = z[np.abs(z.imag) > 1e-12 * (1.0 + np.abs(z.real))]
    # dedupe collapsed seeds
    keep = []
    for zi in z:
        if all(abs(zi - zk) > 1e-9 * (1.0 + abs(zi)) for zk in keep):
            keep.append(zi)
    z = np.array(keep, dtype=complex)
    if len(z) < n_complex:
        # near-collision pairs can be missed by LAPACK: seed at the
        # unsolvable turning points not yet represented
        s_above = _stretch_sign_above(n)
        log_t = params.log_target
        for j in range(n - 1):
            if s_above[j] < 0 or m_plus[j] >= log_t:
                continue
            tp = bs.turning_points[j]
            if len(z) and np.min(np.abs(z - tp)) < 0.5:
                continue
            for im0 in (1e-6, 1e-3, 1e-1):
                zj = _newton_complex_dd(shifted, [complex(tp, im0 * (1 + abs(tp)))])
                if abs(zj[0].imag) > 1e-12 * (1.0 + abs(zj[0].real)):
                    if not len(z) or np.min(np.abs(z - zj[0])) > 1e-9 * (1 + abs(zj[0])):
                        z = np.append(z, [zj[0], np.conj(zj[0])])
                        break
    if len(z) != n_complex:
        raise CountMismatch(
            f"expected {n_complex} complex eigenvalues, found {len(z)}",
            diagnostics={"m_plus_log": m_plus, "log_target": params.log_target,
                         "seeds": seeds, "polished": z})
    # enforce exact conjugate pairing
    upper = np.sort_complex(z[z.imag > 0])
    lower = np.sort_complex(np.conj(z[z.imag < 0]))
    if len(upper) != len(lower) or np.any(np.abs(upper - lower)
                                          > 1e-8 * (1.0 + np.abs(upper))):
        raise CountMismatch(
            "complex eigenvalues do not pair into conjugates",
            diagnostics={"upper": upper, "lower": lower})
    pairs = 0.5 * (upper + lower)
    return np.concatenate([pairs, np.conj(pairs)])


def eigvals_g(sample, params: SpectralParams, precision="standard",
              bs: BandStructure | None = None) -> SpectrumResult:
    """All n eigenvalues of H_n(g) via the discriminant equation."""
    n = sample.n
    if params.n != n:
        raise InvalidSpec(f"params.n = {params.n} does not match sample n = {n}")
    if bs is None:
        bs = band_structure(sample)
    s_above = _stretch_sign_above(n)
    m_plus = _positive_end_logmag(bs, s_above)
    log_t = params.log_target
    solvable = m_plus >= log_t

    reals = {}
    idx = np.nonzero(solvable)[0]
    if len(idx):
        finite = np.isfinite(m_plus[idx])
        at_tp = idx[finite & (m_plus[idx] - log_t <= 0.0)]
        # stretches whose positive end exactly attains the target peg the
        # eigenvalue at the turning point
        exact = set()
        for j in at_tp:
            if m_plus[j] == log_t:
                tpj = bs.turning_points[j if s_above[j] > 0 else j - 1]
                reals[int(j)] = float(tpj)
                exact.add(int(j))
        todo = np.array([j for j in idx if int(j) not in exact], dtype=int)
        if len(todo):
            found = _bisect_stretches(sample, bs, todo, s_above, params)
            for j, x in zip(todo, found):
                reals[int(j)] = float(x)
    if precision == "extended":
        t_dd = params.target_dd
        for j in list(reals):
            reals[j] = float(_dd_newton_real(sample, reals[j], t_dd))
    elif precision != "standard":
        raise ValueError(f"unknown precision {precision!r}")

    n_complex = n - len(reals)
    complexes = np.empty(0, dtype=complex)
    if n_complex:
        complexes = _complex_eigs(sample, params, n_complex, bs, m_plus)

    eig = np.concatenate([
        np.array([complex(v, 0.0) for v in reals.values()], dtype=complex),
        complexes])
    labels = np.concatenate([
        np.array(list(reals), dtype=int), np.full(len(complexes), -1, dtype=int)])
    order = np.lexsort((eig.imag, eig.real))
    eig, labels = eig[order], labels[order]
    return SpectrumResult(eigenvalues=eig, is_real=labels >= 0, labels=labels,
                          params=params)


def eigvals_hermitian(sample, precision="standard",
                      bs: BandStructure | None = None) -> SpectrumResult:
    """The g = 0 (Hermitian) spectrum: Delta_n(lambda) = 2, all real."""
    return eigvals_g(sample, SpectralParams(sample.n, 0.0), precision, bs=bs)


# ---------------------------------------------------------------------------
# dense characteristic-polynomial oracle
# ---------------------------------------------------------------------------

ORACLE_N_MAX = 12


def _dd_matmul(A, B):
    from .dd import dd_add, dd_mul

    n = len(A)
    C = [[(0.0, 0.0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = (0.0, 0.0)
            for l in range(n):
                acc = dd_add(*acc, *dd_mul(*A[i][l], *B[l][j]))
            C[i][j] = acc
    return C


def charpoly_oracle(sample, g):
    """Coefficients of det(zI - H_n(g)) by Faddeev-LeVerrier in
    double-double; deliberately independent of the transfer-matrix paths."""
    from .dd import dd_add, dd_div_d, dd_exp, dd_mul, dd_neg, dd_sub
    from .discriminant import DiscCoeffs

    n = sample.n
    if n > ORACLE_N_MAX:
        raise CapabilityExceeded(f"oracle supports n <= {ORACLE_N_MAX}, got {n}")
    eg = dd_exp(float(g), 0.0)
    eginv = dd_exp(-float(g), 0.0)
    H = [[(0.0, 0.0)] * n for _ in range(n)]
    for k in range(n):
        H[k][k] = (float(sample.values[k]), 0.0)
    for k in range(n):
        # e^{-g} from the left neighbor, e^{+g} from the right neighbor
        H[k][(k - 1) % n] = dd_add(*H[k][(k - 1) % n], *eginv)
        H[k][(k + 1) % n] = dd_add(*H[k][(k + 1) % n], *eg)
    c = [(0.0, 0.0)] * (n + 1)
    c[n] = (1.0, 0.0)
    M = [[(0.0, 0.0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        M = _dd_matmul(H, M)
        for i in range(n):
            M[i][i] = dd_add(*M[i][i], *c[n - k + 1])
        HM = _dd_matmul(H, M)
        tr = (0.0, 0.0)
        for i in range(n):
            tr = dd_add(*tr, *HM[i][i])
        c[n - k] = dd_neg(*dd_div_d(*tr, float(k)))
    hi = np.array([ck[0] for ck in c])
    lo = np.array([ck[1] for ck in c])
    return DiscCoeffs(hi=hi, lo=lo)


# ---------------------------------------------------------------------------
# eigenvalue flow in g
# ---------------------------------------------------------------------------

def critical_g(sample, bs: BandStructure, j):
    """g at which lambda_j collides with its neighbor and leaves the axis:
    arccosh(|Delta(E'_*)| / 2) / n for the turning point E'_* toward which
    lambda_j moves; +inf for an outer eigenvalue moving outward."""
    n = sample.n
    s_above = _stretch_sign_above(n)
    if s_above[j] > 0:
        if j >= n - 1:
            return math.inf
        L = float(bs.tp_logmag[j])
    else:
        if j <= 0:
            return math.inf
        L = float(bs.tp_logmag[j - 1])
    x = max(L - LN2, 0.0)      # log(|Delta(E')| / 2) >= 0
    # arccosh(e^x) = x + log(1 + sqrt(1 - e^{-2x})), stable for any x >= 0
    return (x + math.log1p(math.sqrt(max(-math.expm1(-2.0 * x), 0.0)))) / n


@dataclass(frozen=True)
class SpectrumFlow:
    g_grid: np.ndarray
    trajectories: np.ndarray   # shape (n, len(g_grid)), complex
    is_real: np.ndarray        # same shape, bool
    critical_g: np.ndarray     # per j
    direction: tuple           # per j, "left" or "right"

    @property
    def n(self):
        return self.trajectories.shape[0]

    def to_csv(self, path):
        """Frozen schema: g,j,re,im,is_real."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["g", "j", "re", "im", "is_real"])
            for gi, g in enumerate(self.g_grid):
                for j in range(self.n):
                    z = self.trajectories[j, gi]
                    w.writerow([repr(float(g)), j + 1, repr(float(z.real)),
                                repr(float(z.imag)),
                                int(bool(self.is_real[j, gi]))])

    def summary_json(self, path):
        doc = {
            "n": self.n,
            "g_grid": [float(g) for g in self.g_grid],
            "critical_g": [None if math.isinf(c) else float(c)
                           for c in self.critical_g],
            "direction": list(self.direction),
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")


def flow(sample, g_grid, precision="standard") -> SpectrumFlow:
    """Track every eigenvalue along a g grid starting at 0."""
    g_grid = np.asarray(g_grid, dtype=float)
    if len(g_grid) == 0 or g_grid[0] != 0.0:
        raise InvalidSpec("g_grid must start at 0")
    if np.any(np.diff(g_grid) <= 0):
        raise InvalidSpec("g_grid must be strictly increasing")
    n = sample.n
    bs = band_structure(sample)
    s_above = _stretch_sign_above(n)
    direction = tuple("right" if s > 0 else "left" for s in s_above)
    crit = np.array([critical_g(sample, bs, j) for j in range(n)])

    traj = np.empty((n, len(g_grid)), dtype=complex)
    real_flags = np.zeros((n, len(g_grid)), dtype=bool)
    prev = np.full(n, np.nan, dtype=complex)
    prev2 = np.full(n, np.nan, dtype=complex)
    for gi, g in enumerate(g_grid):
        res = eigvals_g(sample, SpectralParams(n, float(g)), precision, bs=bs)
        cur = np.full(n, np.nan, dtype=complex)
        # real eigenvalues carry their stretch label
        for lab, z in zip(res.labels, res.eigenvalues):
            if lab >= 0:
                cur[lab] = z
                real_flags[lab, gi] = True
        # complex ones are matched by continuity with the previous step
        missing = [j for j in range(n) if np.isnan(cur[j].real)]
        cplx = list(res.eigenvalues[res.labels < 0])
        for j in missing:
            if not cplx:
                raise CountMismatch(
                    f"no complex eigenvalue left for trajectory {j}",
                    diagnostics={"g": g, "labels": res.labels})
            if np.isnan(prev[j].real):
                # pair turned complex on this step: anchor near the root
                ref = complex(bs.roots[j], 0.0)
            else:
                ref = prev[j]
            pick = min(range(len(cplx)), key=lambda i: abs(cplx[i] - ref))
            cur[j] = cplx.pop(pick)
        # continuity gate
        if gi >= 1:
            step = np.abs(cur - prev)
            if gi >= 2:
                window = np.maximum(0.5, 10.0 * np.abs(prev - prev2))
            else:
                window = np.full(n, np.inf)
            bad = np.nonzero(step > window)[0]
            if len(bad):
                raise ContinuityBreak(
                    f"trajectory jump beyond continuity window at g={g}: "
                    f"indices {bad.tolist()}")
        traj[:, gi] = cur
        prev2, prev = prev, cur
    return SpectrumFlow(g_grid=g_grid, trajectories=traj, is_real=real_flags,
                        critical_g=crit, direction=direction)
