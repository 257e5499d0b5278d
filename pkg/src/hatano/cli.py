"""Command-line front end: experiment configuration, orchestration,
reproducible manifests and CSV/JSON/SVG emission.

Every command writes its artifacts plus a ``manifest.json`` recording the
configuration verbatim, the RNG generator identity, build information and
wall time. Re-running a command from its manifest (``--from-manifest``)
reproduces all CSV/JSON artifacts byte-identically; only the manifest's
own wall-time field differs.

Exit codes: 0 success (statistical failures live in the report, they do
not change the exit code), 1 configuration error, 2 capability exceeded,
3 structure violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__, kernels, verify
from .bands import band_rates, band_structure, spectral_interval
from .errors import (CapabilityExceeded, ContinuityBreak, CountMismatch,
                     DegenerateSpec, InvalidSpec, PrecisionExceeded,
                     SchemaError, StructureViolation, ToleranceUnreachable)
from .potential import (GENERATOR_ID, DistributionSpec, load_sample,
                        sample_potential, save_sample, zero_potential)
from .spectrum import SpectralParams, critical_g, eigvals_g, \
    eigvals_hermitian, flow
from .transfer import gamma_profile

EXIT_CONFIG = 1
EXIT_CAPABILITY = 2
EXIT_STRUCTURE = 3

_CONFIG_ERRORS = (InvalidSpec, SchemaError, DegenerateSpec, OSError,
                  json.JSONDecodeError)
_CAPABILITY_ERRORS = (CapabilityExceeded, PrecisionExceeded,
                      ToleranceUnreachable)
_STRUCTURE_ERRORS = (StructureViolation, CountMismatch, ContinuityBreak)


def _threads():
    try:
        return max(1, int(os.environ.get("HATANO_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description; serialized verbatim into manifests.

    The JSON schema is documented in docs/config.md.
    """

    spec: DistributionSpec
    n: int = 60
    g_grid: tuple = (0.05, 0.10, 0.15)
    epsilon: float = 0.15
    realizations: int = 200
    seed: int = 0
    lyapunov: dict = field(default_factory=lambda: {
        "e_spacing": 0.02, "steps": 100_000, "replicas": 32})
    precision: str = "standard"
    output_dir: str = "out"

    def __post_init__(self):
        if self.n < 2:
            raise InvalidSpec(f"n must be >= 2, got {self.n}")
        if len(self.g_grid) == 0 or any(g < 0.0 for g in self.g_grid):
            raise InvalidSpec(f"g_grid must be nonempty, all >= 0: {self.g_grid}")
        if not 0.0 < self.epsilon < 1.0:
            raise InvalidSpec(f"epsilon must be in (0, 1), got {self.epsilon}")
        if self.realizations < 1:
            raise InvalidSpec(f"realizations must be >= 1, got {self.realizations}")
        if self.precision not in ("standard", "extended"):
            raise InvalidSpec(f"unknown precision policy {self.precision!r}")
        for key in ("e_spacing", "steps", "replicas"):
            if key not in self.lyapunov:
                raise InvalidSpec(f"lyapunov config missing {key!r}")
        if self.lyapunov["e_spacing"] <= 0.0:
            raise InvalidSpec("lyapunov e_spacing must be positive")

    def to_dict(self):
        return {
            "spec": self.spec.to_dict(), "n": self.n,
            "g_grid": list(self.g_grid), "epsilon": self.epsilon,
            "realizations": self.realizations, "seed": self.seed,
            "lyapunov": dict(self.lyapunov), "precision": self.precision,
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise SchemaError(f"config must be a JSON object, got {type(d).__name__}")
        known = {"spec", "n", "g_grid", "epsilon", "realizations", "seed",
                 "lyapunov", "precision", "output_dir"}
        unknown = set(d) - known
        if unknown:
            raise SchemaError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(d)
        if "spec" in kwargs:
            kwargs["spec"] = DistributionSpec.from_dict(kwargs["spec"])
        else:
            kwargs["spec"] = DistributionSpec.uniform(0.0, 1.0)
        if "g_grid" in kwargs:
            kwargs["g_grid"] = tuple(float(g) for g in kwargs["g_grid"])
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise SchemaError(f"malformed config: {exc}") from exc


def default_config():
    """The shipped default: uniform(0, 1), n = 60, 200 realizations."""
    return ExperimentConfig(spec=DistributionSpec.uniform(0.0, 1.0))


def _load_config(args):
    if getattr(args, "from_manifest", None):
        with open(args.from_manifest, encoding="utf-8") as fh:
            doc = json.load(fh)
        if "config" not in doc:
            raise SchemaError(f"manifest has no config: {args.from_manifest}")
        cfg = ExperimentConfig.from_dict(doc["config"])
    elif getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            cfg = ExperimentConfig.from_dict(json.load(fh))
    else:
        cfg = default_config()
    # flag overrides
    d = cfg.to_dict()
    if getattr(args, "zero_potential", False):
        d["spec"] = {"kind": "constant", "c": 0.0}
    if getattr(args, "n", None) is not None:
        d["n"] = args.n
    if getattr(args, "g", None) is not None:
        d["g_grid"] = [float(x) for x in args.g.split(",")]
    if getattr(args, "eps", None) is not None:
        d["epsilon"] = args.eps
    if getattr(args, "seed", None) is not None:
        d["seed"] = args.seed
    if getattr(args, "out", None) is not None:
        d["output_dir"] = args.out
    return ExperimentConfig.from_dict(d)


def _g_is_explicit(args):
    """Whether the g grid came from the user rather than the defaults."""
    if getattr(args, "g", None) is not None:
        return True
    for attr in ("config", "from_manifest"):
        path = getattr(args, attr, None)
        if path:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
            if attr == "from_manifest":
                doc = doc.get("config", {})
            return "g_grid" in doc
    return False


# ---------------------------------------------------------------------------
# manifests and writers
# ---------------------------------------------------------------------------

def _write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _write_manifest(outdir, command, cfg, files, wall):
    doc = {
        "command": command,
        "config": cfg.to_dict(),
        "generator_id": GENERATOR_ID,
        "build": {
            "package": f"hatano {__version__}",
            "kernel_backend": kernels.BACKEND,
            "numpy": np.__version__,
            "python": sys.version.split()[0],
        },
        "hatano_threads": _threads(),
        "wall_time_s": round(wall, 3),
        "files": sorted(files),
    }
    _write_json(os.path.join(outdir, "manifest.json"), doc)


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _sample_for(cfg, index=0):
    if cfg.spec.is_degenerate and cfg.spec.kind == "constant" and cfg.spec.c == 0.0:
        return zero_potential(cfg.n)
    return sample_potential(cfg.spec, cfg.n, cfg.seed + index)


def _gamma_for(cfg):
    K0, K1 = (-2.0 - cfg.spec.bound - 1.0, 2.0 + cfg.spec.bound + 1.0)
    grid = np.arange(K0, K1 + 1e-12, cfg.lyapunov["e_spacing"])
    return gamma_profile(cfg.spec, grid, steps=cfg.lyapunov["steps"],
                         replicas=cfg.lyapunov["replicas"], seed=cfg.seed)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_sample(cfg):
    t0 = time.perf_counter()
    outdir = cfg.output_dir
    os.makedirs(outdir, exist_ok=True)
    sample = _sample_for(cfg)
    save_sample(sample, os.path.join(outdir, "sample.json"))
    _write_manifest(outdir, "sample", cfg, ["sample.json"],
                    time.perf_counter() - t0)
    return 0


def cmd_lyapunov(cfg):
    t0 = time.perf_counter()
    outdir = cfg.output_dir
    os.makedirs(outdir, exist_ok=True)
    gp = _gamma_for(cfg)
    gp.to_csv(os.path.join(outdir, "gamma.csv"))
    _write_manifest(outdir, "lyapunov", cfg, ["gamma.csv"],
                    time.perf_counter() - t0)
    return 0


def cmd_bands(cfg):
    t0 = time.perf_counter()
    outdir = cfg.output_dir
    os.makedirs(outdir, exist_ok=True)
    sample = _sample_for(cfg)
    bs = band_structure(sample, cfg.precision)
    bs.to_csv(os.path.join(outdir, "bands.csv"))
    _write_manifest(outdir, "bands", cfg, ["bands.csv"],
                    time.perf_counter() - t0)
    return 0


def _spectrum_rows(res):
    rows = []
    for i, z in enumerate(res.eigenvalues):
        rows.append([i + 1, repr(float(z.real)), repr(float(z.imag)),
                     int(res.is_real[i])])
    return rows


def cmd_spectrum(cfg):
    t0 = time.perf_counter()
    outdir = cfg.output_dir
    os.makedirs(outdir, exist_ok=True)
    sample = _sample_for(cfg)
    g = float(cfg.g_grid[0])
    res = eigvals_g(sample, SpectralParams(cfg.n, g), cfg.precision)
    _write_csv(os.path.join(outdir, "spectrum.csv"),
               ["j", "re", "im", "is_real"], _spectrum_rows(res))
    _write_manifest(outdir, "spectrum", cfg, ["spectrum.csv"],
                    time.perf_counter() - t0)
    return 0


def _flow_grid(cfg, explicit_g=False):
    """Default flow grid: 64 points on [0, min(1.2 max gamma_hat, 2)].

    A coarse Monte Carlo profile supplies max gamma_hat; for a
    disorder-free law the grid simply spans [0, 2]. A user-supplied g
    grid is used directly (with 0 prepended).
    """
    if explicit_g:
        grid = sorted(set([0.0] + [float(g) for g in cfg.g_grid]))
        if len(grid) > 1:
            return grid
    if cfg.spec.is_degenerate:
        gmax = 2.0
    else:
        K0, K1 = (-2.0 - cfg.spec.bound - 1.0, 2.0 + cfg.spec.bound + 1.0)
        gp = gamma_profile(cfg.spec, np.arange(K0, K1 + 1e-12, 0.1),
                           steps=20_000, replicas=8, seed=cfg.seed)
        gmax = min(1.2 * float(np.max(gp.values)), 2.0)
    return list(np.linspace(0.0, gmax, 64))


def cmd_flow(cfg, explicit_g=False):
    t0 = time.perf_counter()
    outdir = cfg.output_dir
    os.makedirs(outdir, exist_ok=True)
    sample = _sample_for(cfg)
    fl = flow(sample, _flow_grid(cfg, explicit_g), cfg.precision)
    fl.to_csv(os.path.join(outdir, "flow.csv"))
    fl.summary_json(os.path.join(outdir, "flow_summary.json"))
    _write_manifest(outdir, "flow", cfg, ["flow.csv", "flow_summary.json"],
                    time.perf_counter() - t0)
    return 0


def cmd_verify(cfg):
    """All checkers on a single realization."""
    t0 = time.perf_counter()
    outdir = cfg.output_dir
    os.makedirs(outdir, exist_ok=True)
    sample = _sample_for(cfg)
    bs = band_structure(sample, cfg.precision)
    report = verify.VerificationReport()
    report.extend(verify.check_last_inequality(sample, bs=bs))
    lam0 = eigvals_hermitian(sample, bs=bs).real_by_band()
    report.extend(verify.check_markov(sample, (float(lam0[0]), float(lam0[-1]))))
    gp = None
    if not cfg.spec.is_degenerate:
        gp = _gamma_for(cfg)
        report.extend(verify.check_turning_point_bound(
            sample, cfg.epsilon, gp, bs=bs))
        report.extend(verify.check_derivative_ld(sample, gp, cfg.epsilon))
    for g in cfg.g_grid:
        report.extend(verify.check_disc_identity(sample, g))
        report.extend(verify.check_intermediate_cosh_bound(sample, g, bs=bs))
        if gp is not None:
            report.extend(verify.check_theorem_bounds(
                sample, g, cfg.epsilon, gp, bs=bs))
    report.to_csv(os.path.join(outdir, "verify.csv"))
    report.to_json(os.path.join(outdir, "summary.json"))
    _write_manifest(outdir, "verify", cfg, ["verify.csv", "summary.json"],
                    time.perf_counter() - t0)
    return 0


# ---------------------------------------------------------------------------
# sweep: the full pipeline over a realization ensemble
# ---------------------------------------------------------------------------

def _sweep_one(arg):
    """One realization: sample -> bands -> flow -> checkers -> rates."""
    cfg, gp, r = arg
    sample = sample_potential(cfg.spec, cfg.n, cfg.seed + r)
    bs = band_structure(sample, cfg.precision)
    n = cfg.n
    lam0 = eigvals_hermitian(sample, bs=bs).real_by_band()
    gam = gp.gamma(lam0)
    fl = flow(sample, sorted(set([0.0] + [float(g) for g in cfg.g_grid])),
              cfg.precision)

    records = []
    for g in cfg.g_grid:
        records += verify.check_theorem_bounds(sample, g, cfg.epsilon, gp,
                                               bs=bs)
        records += verify.check_intermediate_cosh_bound(sample, g, bs=bs)
    records += verify.check_turning_point_bound(sample, cfg.epsilon, gp,
                                                bs=bs)
    min_eig_gap = float(np.min(np.diff(lam0)))
    records.append(verify.CheckRecord.make(
        "lemma5", sample.sample_id, None, None, cfg.epsilon,
        min_eig_gap - math.exp(-cfg.epsilon * n)))

    rate_records, fits = verify.rate_table(sample, cfg.g_grid, gp, bs=bs)
    rates = band_rates(bs)
    crit = fl.critical_g
    structure = [(sample.sample_id, j, float(bs.roots[j]),
                  float(bs.logwidths[j]), float(rates[j]), float(gam[j]),
                  float(crit[j]))
                 for j in range(n)]
    flow_csv = fl if r == 0 else None
    return sample.sample_id, records, rate_records, fits, structure, \
        min_eig_gap, flow_csv


def _sweep_aggregate(cfg, results):
    """Collect per-realization results into the summary aggregates."""
    n = cfg.n
    eps = cfg.epsilon
    joint = {"pass": 0, "fail": 0, "excluded": 0}
    reality = {"pass": 0, "fail": 0, "inconclusive": 0}
    slopes, icepts = [], []
    crit_ok = crit_total = 0
    bw_dev, bw_upper = [], 0
    eig_gap_ok = root_gap_ok = 0
    for sid, records, rate_records, fits, structure, min_eig_gap, _ in results:
        pairs = {}
        for rec in records:
            if rec.statement_id == "thm1.real" and rec.status != "not-applicable":
                key = "inconclusive" if rec.status == "inconclusive" else \
                    ("pass" if rec.passed else "fail")
                reality[key] += 1
            if rec.statement_id in ("thm1.upper", "thm1.lower"):
                pairs.setdefault((rec.j, rec.g), []).append(rec)
            if rec.statement_id == "lemma5" and rec.passed:
                eig_gap_ok += 1
            if rec.statement_id == "non:05" and rec.passed:
                root_gap_ok += 1
        for recs in pairs.values():
            if any(r.status in ("inconclusive", "skipped") for r in recs):
                joint["excluded"] += 1
            elif all(r.passed for r in recs) and len(recs) == 2:
                joint["pass"] += 1
            else:
                joint["fail"] += 1
        for j, fit in fits.items():
            gamma_j = None
            for row in structure:
                if row[1] == j:
                    gamma_j = row[5]
            slopes.append(abs(fit.slope + 1.0))
            icepts.append(abs(fit.intercept - gamma_j))
        for _, j, _, _, rate, gamma_j, cg in structure:
            if 0 < j < n - 1:
                crit_total += 1
                if cg >= gamma_j - eps:
                    crit_ok += 1
            if math.isfinite(rate):
                bw_dev.append(abs(rate - gamma_j))
                if rate > gamma_j - eps:
                    bw_upper += 1
    decided = joint["pass"] + joint["fail"]
    r_decided = reality["pass"] + reality["fail"]
    n_bw = len(bw_dev)
    return {
        "realizations": len(results),
        "reality_frequency": reality["pass"] / r_decided if r_decided else None,
        "reality_counts": reality,
        "two_sided_frequency": joint["pass"] / decided if decided else None,
        "two_sided_counts": joint,
        "rate_fit": {
            "median_abs_slope_plus_1": float(np.median(slopes)) if slopes else None,
            "median_abs_intercept_minus_gamma": float(np.median(icepts)) if icepts else None,
            "fits": len(slopes),
        },
        "critical_g_frequency": crit_ok / crit_total if crit_total else None,
        "bandwidth": {
            "median_abs_rate_minus_gamma": float(np.median(bw_dev)) if bw_dev else None,
            "upper_bound_frequency": bw_upper / n_bw if n_bw else None,
        },
        "spacing": {
            "eig_gap_frequency": eig_gap_ok / len(results),
            "root_gap_frequency": root_gap_ok / len(results),
        },
    }


def cmd_sweep(cfg):
    t0 = time.perf_counter()
    outdir = cfg.output_dir
    os.makedirs(outdir, exist_ok=True)
    if cfg.spec.is_degenerate:
        raise DegenerateSpec("sweep needs a nondegenerate potential law")
    gp = _gamma_for(cfg)
    gp.to_csv(os.path.join(outdir, "gamma.csv"))

    args = [(cfg, gp, r) for r in range(cfg.realizations)]
    threads = _threads()
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_sweep_one, args))
    else:
        results = [_sweep_one(a) for a in args]

    report = verify.VerificationReport()
    rate_rows, fit_rows, structure_rows = [], [], []
    for sid, records, rate_records, fits, structure, _, fl in results:
        report.extend(records)
        for rr in rate_records:
            rate_rows.append([sid, rr.j, repr(rr.g), repr(rr.rate),
                              repr(rr.predicted)])
        for j, fit in sorted(fits.items()):
            gamma_j = next(row[5] for row in structure if row[1] == j)
            fit_rows.append([sid, j, repr(fit.slope), repr(fit.intercept),
                             repr(gamma_j)])
        for row in structure:
            structure_rows.append([row[0], row[1]] + [repr(x) for x in row[2:]])
        if fl is not None:
            fl.to_csv(os.path.join(outdir, "flow.csv"))

    report.to_csv(os.path.join(outdir, "verify.csv"))
    _write_csv(os.path.join(outdir, "rates.csv"),
               ["sample_id", "j", "g", "rate", "predicted"], rate_rows)
    _write_csv(os.path.join(outdir, "fits.csv"),
               ["sample_id", "j", "slope", "intercept", "gamma_hat"], fit_rows)
    _write_csv(os.path.join(outdir, "structure.csv"),
               ["sample_id", "j", "root", "logwidth", "band_rate",
                "gamma_hat", "critical_g"], structure_rows)
    summary = {"statements": report.summary(),
               "aggregates": _sweep_aggregate(cfg, results)}
    _write_json(os.path.join(outdir, "summary.json"), summary)
    files = ["gamma.csv", "verify.csv", "rates.csv", "fits.csv",
             "structure.csv", "summary.json", "flow.csv"]
    _write_manifest(outdir, "sweep", cfg, files, time.perf_counter() - t0)
    return 0


# ---------------------------------------------------------------------------
# plotting
# ---------------------------------------------------------------------------

def _setup_matplotlib():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "hatano"
    return plt


def _save_svg(fig, path):
    # no creation date: reruns must produce identical bytes
    fig.savefig(path, format="svg", metadata={"Date": None})


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def cmd_plot(cfg, indir=None):
    """Render SVG figures from previously written CSV artifacts."""
    t0 = time.perf_counter()
    indir = indir or cfg.output_dir
    outdir = cfg.output_dir
    os.makedirs(outdir, exist_ok=True)
    plt = _setup_matplotlib()
    files = []

    spath = os.path.join(indir, "spectrum.csv")
    fpath = os.path.join(indir, "flow.csv")
    if os.path.exists(spath) or os.path.exists(fpath):
        fig, ax = plt.subplots(figsize=(5, 4))
        if os.path.exists(spath):
            rows = _read_csv(spath)
            re = [float(r["re"]) for r in rows]
            im = [float(r["im"]) for r in rows]
        else:
            rows = _read_csv(fpath)
            gmax = max(float(r["g"]) for r in rows)
            re = [float(r["re"]) for r in rows if float(r["g"]) == gmax]
            im = [float(r["im"]) for r in rows if float(r["g"]) == gmax]
        ax.scatter(re, im, s=12)
        ax.axhline(0.0, lw=0.5, color="gray")
        ax.set_xlabel("Re λ")
        ax.set_ylabel("Im λ")
        ax.set_title("spectrum")
        fig.tight_layout()
        _save_svg(fig, os.path.join(outdir, "spectrum.svg"))
        plt.close(fig)
        files.append("spectrum.svg")

    rpath = os.path.join(indir, "rates.csv")
    if os.path.exists(rpath):
        rows = _read_csv(rpath)
        fig, ax = plt.subplots(figsize=(5, 4))
        series = {}
        for r in rows:
            rate = float(r["rate"])
            if math.isfinite(rate):
                series.setdefault((r["sample_id"], int(r["j"])), []).append(
                    (float(r["g"]), rate))
        for pts in list(series.values())[:200]:
            pts.sort()
            ax.plot(*zip(*pts), lw=0.4, color="steelblue", alpha=0.4)
        if series:
            allpts = [p for pts in series.values() for p in pts]
            g0 = min(p[0] for p in allpts)
            r0 = float(np.median([p[1] for p in allpts if p[0] == g0]))
            gs = sorted({p[0] for p in allpts})
            ax.plot(gs, [r0 - (g - g0) for g in gs], "k--", lw=1.2,
                    label="slope −1")
            ax.legend()
        ax.set_xlabel("g")
        ax.set_ylabel("rate")
        ax.set_title("displacement rate vs g")
        fig.tight_layout()
        _save_svg(fig, os.path.join(outdir, "rates.svg"))
        plt.close(fig)
        files.append("rates.svg")

    for name in ("structure.csv", "bands.csv"):
        bpath = os.path.join(indir, name)
        if not os.path.exists(bpath):
            continue
        rows = _read_csv(bpath)
        n_per = max(int(r["j"]) for r in rows)
        vals = [-float(r["logwidth"]) / n_per for r in rows
                if math.isfinite(float(r["logwidth"]))]
        fig, ax = plt.subplots(figsize=(5, 4))
        ax.hist(vals, bins=40)
        ax.set_xlabel("−(1/n) log |B|")
        ax.set_ylabel("count")
        ax.set_title("bandwidth rates")
        fig.tight_layout()
        _save_svg(fig, os.path.join(outdir, "bandwidths.svg"))
        plt.close(fig)
        files.append("bandwidths.svg")
        break

    _write_manifest(outdir, "plot", cfg, files, time.perf_counter() - t0)
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config JSON")
    common.add_argument("--from-manifest", dest="from_manifest",
                        help="rerun with the config stored in a manifest")
    common.add_argument("--n", type=int, help="ring length override")
    common.add_argument("--g", help="comma-separated g grid override")
    common.add_argument("--eps", type=float, help="epsilon override")
    common.add_argument("--seed", type=int, help="seed override")
    common.add_argument("--out", help="output directory override")
    common.add_argument("--zero-potential", action="store_true",
                        help="use the constant-zero potential")

    p = argparse.ArgumentParser(
        prog="hatano",
        description="Spectra, Lyapunov exponents and eigenvalue flow for "
                    "the non-Hermitian Anderson model on a ring")
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=fn.__doc__)
        if name == "plot":
            sp.add_argument("--from", dest="indir",
                            help="directory holding the CSV artifacts")
    return p


_COMMANDS = {
    "sample": cmd_sample,
    "lyapunov": cmd_lyapunov,
    "bands": cmd_bands,
    "spectrum": cmd_spectrum,
    "flow": cmd_flow,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "plot": cmd_plot,
}


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command == "plot":
            return cmd_plot(cfg, indir=getattr(args, "indir", None))
        if args.command == "flow":
            return cmd_flow(cfg, explicit_g=_g_is_explicit(args))
        return _COMMANDS[args.command](cfg)
    except _CONFIG_ERRORS as exc:
        print(f"hatano: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _CAPABILITY_ERRORS as exc:
        print(f"hatano: capability exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except _STRUCTURE_ERRORS as exc:
        print(f"hatano: structure violation: {exc}", file=sys.stderr)
        return EXIT_STRUCTURE


if __name__ == "__main__":
    sys.exit(main())
