"""Transfer-matrix products with rescaling, Lyapunov exponent estimation,
and large-deviation statistics.

The per-step growth rate gamma(E) of the 2x2 products A_{E,n}...A_{E,1}
(with A_{E,k} = [[E - v_k, -1], [1, 0]]) is estimated by Monte Carlo over
independent disorder replicas, with every replica deriving its own
counter-based stream from (seed, replica index). Profiles over an energy
grid share the disorder across grid points, which both saves work and
makes the profile a smooth function of E for interpolation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateSpec, InvalidSpec
from .potential import DistributionSpec, draw_values, seed_sequence

CHUNK = 4096
# stream index offset separating the internal gamma_hat estimate of
# large_deviation_stats from its replica streams
_LD_GAMMA_STREAM = 1 << 20


@dataclass(frozen=True)
class TransferMatrix:
    """One-step matrix A_{E,k} = [[E - v_k, -1], [1, 0]]."""

    energy: float
    v: float

    @property
    def matrix(self):
        return np.array([[self.energy - self.v, -1.0], [1.0, 0.0]])

    @property
    def det(self):
        m = self.matrix
        return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


@dataclass(frozen=True)
class ScaledMatrix2:
    """2x2 matrix stored as m * exp(logscale) with ||m||_F in [0.5, 2]."""

    m: np.ndarray
    logscale: float

    def __post_init__(self):
        fro = float(np.sqrt(np.sum(self.m * self.m)))
        if not 0.5 <= fro <= 2.0:
            raise ValueError(f"Frobenius norm {fro} outside [0.5, 2]")

    @property
    def log_norm(self):
        """log of the Frobenius norm of the represented matrix."""
        return self.logscale + math.log(float(np.sqrt(np.sum(self.m * self.m))))

    @property
    def log_det(self):
        d = float(self.m[0, 0] * self.m[1, 1] - self.m[0, 1] * self.m[1, 0])
        return 2.0 * self.logscale + math.log(abs(d))

    def value(self):
        """Materialize the matrix (overflows for logscale >~ 700)."""
        return self.m * math.exp(self.logscale)


@dataclass(frozen=True)
class LyapunovEstimate:
    energy: float
    gamma_hat: float
    stderr: float
    steps: int
    replicas: int


def transfer_product(sample, E) -> ScaledMatrix2:
    """A_{E,n} ... A_{E,1} for one realization, in scaled form."""
    a, b, c, d, logscale = kernels.transfer_product_scaled(
        np.ascontiguousarray(sample.values), float(E))
    return ScaledMatrix2(m=np.array([[a, b], [c, d]]), logscale=logscale)


def _check_mc_args(spec, steps, replicas):
    if not isinstance(spec, DistributionSpec):
        raise InvalidSpec(f"not a DistributionSpec: {spec!r}")
    if spec.is_degenerate:
        raise DegenerateSpec(
            "Lyapunov Monte Carlo requires a nondegenerate potential law")
    if steps < 1000:
        raise InvalidSpec(f"steps must be >= 1000, got {steps}")
    if replicas < 1:
        raise InvalidSpec(f"replicas must be >= 1, got {replicas}")


def _run_streams(spec, E_arr, steps, replicas, seed):
    """log||product|| per (energy, replica) after ``steps`` steps.

    The disorder is shared across all grid energies; replicas are
    independent streams keyed by (seed, replica index) and merged in
    replica order, so the result is independent of chunking.
    """
    E_arr = np.ascontiguousarray(E_arr, dtype=float)
    rngs = [np.random.Generator(np.random.Philox(seed_sequence(seed, r)))
            for r in range(replicas)]
    nE = len(E_arr)
    M = np.zeros((nE, replicas, 2, 2))
    M[:, :, 0, 0] = 1.0
    M[:, :, 1, 1] = 1.0
    logsum = np.zeros((nE, replicas))
    done = 0
    while done < steps:
        length = min(CHUNK, steps - done)
        v = np.ascontiguousarray(
            np.stack([draw_values(spec, rng, length) for rng in rngs]))
        kernels.advance_products(v, E_arr, M, logsum)
        done += length
    return logsum


def lyapunov_mc(spec, E, steps, replicas=32, seed=0) -> LyapunovEstimate:
    """Monte Carlo estimate of gamma(E) = lim (1/n) log||A_{E,n}...A_{E,1}||."""
    _check_mc_args(spec, steps, replicas)
    per = _run_streams(spec, np.array([float(E)]), steps, replicas, seed)[0] / steps
    stderr = float(np.std(per, ddof=1) / math.sqrt(replicas)) if replicas > 1 else 0.0
    return LyapunovEstimate(energy=float(E), gamma_hat=float(np.mean(per)),
                            stderr=stderr, steps=int(steps), replicas=int(replicas))


def lyapunov_profile(spec, E_grid, steps, replicas=32, seed=0):
    """One LyapunovEstimate per grid point, with disorder shared across E."""
    _check_mc_args(spec, steps, replicas)
    E_grid = np.asarray(E_grid, dtype=float)
    if E_grid.ndim != 1 or len(E_grid) == 0:
        raise InvalidSpec("E_grid must be a nonempty 1-d array")
    if np.any(np.diff(E_grid) < 0):
        raise InvalidSpec("E_grid must be sorted ascending")
    per = _run_streams(spec, E_grid, steps, replicas, seed) / steps
    out = []
    for k, E in enumerate(E_grid):
        stderr = (float(np.std(per[k], ddof=1) / math.sqrt(replicas))
                  if replicas > 1 else 0.0)
        out.append(LyapunovEstimate(energy=float(E), gamma_hat=float(np.mean(per[k])),
                                    stderr=stderr, steps=int(steps),
                                    replicas=int(replicas)))
    return out


class GammaProfile:
    """Linear interpolant gamma_hat(E) over a grid, with stderr tracking."""

    def __init__(self, estimates):
        if len(estimates) == 0:
            raise InvalidSpec("empty profile")
        self.energies = np.array([e.energy for e in estimates])
        self.values = np.array([e.gamma_hat for e in estimates])
        self.stderrs = np.array([e.stderr for e in estimates])
        self.steps = estimates[0].steps
        self.replicas = estimates[0].replicas

    def gamma(self, E):
        return np.interp(E, self.energies, self.values)

    def stderr(self, E):
        return np.interp(E, self.energies, self.stderrs)

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["E", "gamma_hat", "stderr", "steps", "replicas"])
            for E, g, s in zip(self.energies, self.values, self.stderrs):
                w.writerow([repr(float(E)), repr(float(g)), repr(float(s)),
                            self.steps, self.replicas])

    @classmethod
    def from_csv(cls, path):
        ests = []
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                ests.append(LyapunovEstimate(
                    energy=float(row["E"]), gamma_hat=float(row["gamma_hat"]),
                    stderr=float(row["stderr"]), steps=int(row["steps"]),
                    replicas=int(row["replicas"])))
        return cls(ests)


def gamma_profile(spec, E_grid, steps, replicas=32, seed=0) -> GammaProfile:
    return GammaProfile(lyapunov_profile(spec, E_grid, steps, replicas, seed))


def thouless_gamma(ensemble, E) -> float:
    """gamma(E) via the Thouless formula on Hermitian spectra.

    Average over samples of (1/n) sum_j log|E - lambda_j(0)|; log-singular
    terms are clipped at log(1e-300), a documented bias when E collides
    with an eigenvalue.
    """
    from .spectrum import eigvals_hermitian

    ensemble = list(ensemble)
    if len(ensemble) < 50:
        raise InvalidSpec(f"need >= 50 samples, got {len(ensemble)}")
    spec = ensemble[0].spec
    for s in ensemble:
        if s.spec != spec:
            raise InvalidSpec("all samples must share one distribution spec")
        if s.n < 40:
            raise InvalidSpec(f"need n >= 40, got {s.n}")
    floor = math.log(1e-300)
    acc = 0.0
    for s in ensemble:
        lam = np.real(eigvals_hermitian(s).eigenvalues)
        terms = np.log(np.maximum(np.abs(E - lam), 1e-300))
        acc += float(np.mean(np.maximum(terms, floor)))
    return acc / len(ensemble)


@dataclass(frozen=True)
class LargeDeviationStats:
    """Empirical law of (1/n) log||product|| - gamma_hat(E)."""

    energy: float
    n: int
    replicas: int
    gamma_hat: float
    mean: float
    variance: float
    tails: dict  # epsilon -> empirical P(|deviation| > epsilon)


def large_deviation_stats(spec, E, n, replicas, seed, gamma_hat=None,
                          tail_epsilons=(0.1, 0.2, 0.3)) -> LargeDeviationStats:
    """Summary of finite-n fluctuations of the per-step log growth."""
    _check_mc_args(spec, max(n, 1000), replicas)
    if n < 2:
        raise InvalidSpec(f"n must be >= 2, got {n}")
    if gamma_hat is None:
        gamma_hat = lyapunov_mc(spec, E, steps=10**5, replicas=32,
                                seed=seed + _LD_GAMMA_STREAM).gamma_hat
    per = _run_streams(spec, np.array([float(E)]), n, replicas, seed)[0] / n
    dev = per - gamma_hat
    tails = {float(eps): float(np.mean(np.abs(dev) > eps)) for eps in tail_epsilons}
    return LargeDeviationStats(
        energy=float(E), n=int(n), replicas=int(replicas),
        gamma_hat=float(gamma_hat), mean=float(np.mean(dev)),
        variance=float(np.var(dev)), tails=tails)
