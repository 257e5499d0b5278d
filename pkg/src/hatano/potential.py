"""Sampling and serialization of i.i.d. bounded potentials.

Sampling uses numpy's counter-based Philox generator so that a
(spec, n, seed) triple regenerates values bit-exactly within one build.
Samples round-trip through JSON losslessly: values are stored as hex float
strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpec, SchemaError

GENERATOR_ID = "numpy.random.Philox"


def seed_sequence(seed, *indices):
    """Deterministic child stream keyed by (seed, *indices)."""
    return np.random.SeedSequence(entropy=(int(seed) & (2**64 - 1), *map(int, indices)))


def _rng(seed, *indices):
    return np.random.Generator(np.random.Philox(seed_sequence(seed, *indices)))


@dataclass(frozen=True)
class DistributionSpec:
    """One of uniform(a, b), bernoulli(p, w) taking +/-w, discrete(values,
    weights), constant(c)."""

    kind: str
    a: float = 0.0
    b: float = 0.0
    p: float = 0.0
    w: float = 0.0
    values: tuple = ()
    weights: tuple = ()
    c: float = 0.0

    def __post_init__(self):
        if self.kind == "uniform":
            if not self.a < self.b:
                raise InvalidSpec(f"uniform requires a < b, got [{self.a}, {self.b}]")
        elif self.kind == "bernoulli":
            if not 0.0 <= self.p <= 1.0:
                raise InvalidSpec(f"bernoulli p must be in [0, 1], got {self.p}")
            if not np.isfinite(self.w):
                raise InvalidSpec("bernoulli amplitude must be finite")
        elif self.kind == "discrete":
            if len(self.values) == 0 or len(self.values) != len(self.weights):
                raise InvalidSpec("discrete requires equal-length values and weights")
            wts = np.asarray(self.weights, dtype=float)
            if np.any(wts < 0.0) or abs(wts.sum() - 1.0) > 1e-12:
                raise InvalidSpec("discrete weights must be nonnegative and sum to 1")
            if not np.all(np.isfinite(self.values)):
                raise InvalidSpec("discrete values must be finite")
        elif self.kind == "constant":
            if not np.isfinite(self.c):
                raise InvalidSpec("constant value must be finite")
        else:
            raise InvalidSpec(f"unknown distribution kind {self.kind!r}")

    # -- constructors -------------------------------------------------------

    @classmethod
    def uniform(cls, a, b):
        return cls(kind="uniform", a=float(a), b=float(b))

    @classmethod
    def bernoulli(cls, p, w):
        return cls(kind="bernoulli", p=float(p), w=float(w))

    @classmethod
    def discrete(cls, values, weights):
        return cls(kind="discrete", values=tuple(map(float, values)),
                   weights=tuple(map(float, weights)))

    @classmethod
    def constant(cls, c):
        return cls(kind="constant", c=float(c))

    # -- properties ---------------------------------------------------------

    @property
    def bound(self):
        """sup |v| over the support."""
        if self.kind == "uniform":
            return max(abs(self.a), abs(self.b))
        if self.kind == "bernoulli":
            return abs(self.w)
        if self.kind == "discrete":
            return max(abs(v) for v in self.values)
        return abs(self.c)

    @property
    def is_degenerate(self):
        """True when the law has a single support point (no disorder)."""
        if self.kind == "constant":
            return True
        if self.kind == "bernoulli":
            return self.p in (0.0, 1.0) or self.w == 0.0
        if self.kind == "discrete":
            support = [v for v, wt in zip(self.values, self.weights) if wt > 0.0]
            return len(set(support)) <= 1
        return False

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "uniform":
            d.update(a=self.a, b=self.b)
        elif self.kind == "bernoulli":
            d.update(p=self.p, w=self.w)
        elif self.kind == "discrete":
            d.update(values=list(self.values), weights=list(self.weights))
        else:
            d.update(c=self.c)
        return d

    @classmethod
    def from_dict(cls, d):
        try:
            kind = d["kind"]
            if kind == "uniform":
                return cls.uniform(d["a"], d["b"])
            if kind == "bernoulli":
                return cls.bernoulli(d["p"], d["w"])
            if kind == "discrete":
                return cls.discrete(d["values"], d["weights"])
            if kind == "constant":
                return cls.constant(d["c"])
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed distribution spec: {d!r}") from exc
        except InvalidSpec:
            raise
        raise SchemaError(f"unknown distribution kind {d.get('kind')!r}")


@dataclass(frozen=True)
class PotentialSample:
    """One disorder realization v_1 .. v_n on the ring."""

    n: int
    spec: DistributionSpec
    seed: int
    generator_id: str
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if len(vals) != self.n:
            raise SchemaError(f"n={self.n} but {len(vals)} values")
        if np.any(np.abs(vals) > self.spec.bound + 1e-12):
            raise SchemaError("values exceed the spec bound")

    @property
    def sample_id(self):
        return f"{self.spec.kind}-n{self.n}-s{self.seed}"


def draw_values(spec: DistributionSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    """i.i.d. values from ``spec`` using the given generator stream."""
    if spec.kind == "uniform":
        return spec.a + (spec.b - spec.a) * rng.random(size)
    if spec.kind == "bernoulli":
        return np.where(rng.random(size) < spec.p, spec.w, -spec.w)
    if spec.kind == "discrete":
        idx = rng.choice(len(spec.values), size=size, p=np.asarray(spec.weights))
        return np.asarray(spec.values)[idx]
    return np.full(size, spec.c)


def sample_potential(spec: DistributionSpec, n: int, seed: int) -> PotentialSample:
    """Draw n i.i.d. values from ``spec`` with the documented generator."""
    if not isinstance(spec, DistributionSpec):
        raise InvalidSpec(f"not a DistributionSpec: {spec!r}")
    if n < 2:
        raise InvalidSpec(f"ring length must be >= 2, got {n}")
    vals = draw_values(spec, _rng(seed), n)
    return PotentialSample(n=n, spec=spec, seed=int(seed),
                           generator_id=GENERATOR_ID, values=vals)


def save_sample(sample: PotentialSample, path) -> None:
    doc = {
        "n": sample.n,
        "spec": sample.spec.to_dict(),
        "seed": sample.seed,
        "generator_id": sample.generator_id,
        "values": [float(v).hex() for v in sample.values],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_sample(path) -> PotentialSample:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {path}") from exc
    try:
        spec = DistributionSpec.from_dict(doc["spec"])
        values = np.array([float.fromhex(v) for v in doc["values"]])
        return PotentialSample(n=int(doc["n"]), spec=spec, seed=int(doc["seed"]),
                               generator_id=str(doc["generator_id"]), values=values)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed sample file: {path}") from exc


def zero_potential(n: int) -> PotentialSample:
    """The constant-zero sample (the analytic Chebyshev oracle case)."""
    return sample_potential(DistributionSpec.constant(0.0), n, seed=0)
