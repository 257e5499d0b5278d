"""End-to-end CLI runs in-process: artifacts, exit codes, reproducibility."""

import csv
import json
import os

import numpy as np
import pytest

from hatano.cli import ExperimentConfig, default_config, main
from hatano.errors import InvalidSpec, SchemaError


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


# -- configuration -------------------------------------------------------------

def test_config_validation():
    cfg = default_config()
    assert cfg.n == 60 and cfg.spec.kind == "uniform"
    with pytest.raises(InvalidSpec):
        ExperimentConfig.from_dict({"n": 1})
    with pytest.raises(InvalidSpec):
        ExperimentConfig.from_dict({"epsilon": 0.0})
    with pytest.raises(InvalidSpec):
        ExperimentConfig.from_dict({"g_grid": []})
    with pytest.raises(InvalidSpec):
        ExperimentConfig.from_dict({"precision": "quad"})
    with pytest.raises(SchemaError):
        ExperimentConfig.from_dict({"nn": 5})
    with pytest.raises(SchemaError):
        ExperimentConfig.from_dict([1, 2])
    roundtrip = ExperimentConfig.from_dict(cfg.to_dict())
    assert roundtrip == cfg


def test_config_error_exit(tmp_path):
    assert main(["verify", "--config", str(tmp_path / "missing.json")]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["verify", "--config", str(bad)]) == 1
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"frobnicate": 1}))
    assert main(["bands", "--config", str(unknown)]) == 1


def test_capability_exit(tmp_path):
    out = str(tmp_path / "out")
    code = main(["spectrum", "--zero-potential", "--n", "800", "--g", "1.0",
                 "--out", out])
    assert code == 2


# -- single commands -----------------------------------------------------------

def test_spectrum_zero_potential_documented_values(tmp_path):
    out = str(tmp_path / "out")
    assert main(["spectrum", "--zero-potential", "--n", "4", "--g", "0.5",
                 "--out", out]) == 0
    rows = read_rows(os.path.join(out, "spectrum.csv"))
    assert rows[0] == ["j", "re", "im", "is_real"]
    assert len(rows) == 5
    vals = sorted((float(r[1]), float(r[2])) for r in rows[1:])
    assert vals[0][0] == pytest.approx(-2.2552519304127614, abs=1e-12)
    assert vals[3][0] == pytest.approx(2.2552519304127614, abs=1e-12)
    assert vals[1] == pytest.approx((0.0, -1.0421906109874948), abs=1e-12)
    assert vals[2] == pytest.approx((0.0, +1.0421906109874948), abs=1e-12)
    # manifest records the config and artifact list
    doc = json.loads(open(os.path.join(out, "manifest.json")).read())
    assert doc["command"] == "spectrum"
    assert doc["files"] == ["spectrum.csv"]
    assert doc["config"]["n"] == 4
    assert doc["config"]["spec"] == {"kind": "constant", "c": 0.0}


def test_sample_and_bands(tmp_path):
    out = str(tmp_path / "out")
    assert main(["sample", "--n", "12", "--seed", "3", "--out", out]) == 0
    from hatano.potential import load_sample
    s = load_sample(os.path.join(out, "sample.json"))
    assert s.n == 12 and s.seed == 3
    assert main(["bands", "--n", "12", "--seed", "3", "--out", out]) == 0
    rows = read_rows(os.path.join(out, "bands.csv"))
    assert rows[0][0] == "j" and len(rows) == 13


def test_flow_explicit_grid(tmp_path):
    out = str(tmp_path / "out")
    assert main(["flow", "--zero-potential", "--n", "4",
                 "--g", "0.1,0.2", "--out", out]) == 0
    rows = read_rows(os.path.join(out, "flow.csv"))
    gs = sorted({r[0] for r in rows[1:]})
    assert gs == ["0.0", "0.1", "0.2"]  # 0 prepended to the explicit grid
    doc = json.loads(open(os.path.join(out, "flow_summary.json")).read())
    assert doc["n"] == 4


def test_verify_command_small(tmp_path):
    out = str(tmp_path / "out")
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({
        "spec": {"kind": "uniform", "a": 0.0, "b": 1.0},
        "n": 16, "g_grid": [0.05], "epsilon": 0.3, "seed": 5,
        "lyapunov": {"e_spacing": 0.1, "steps": 5000, "replicas": 4},
        "output_dir": out,
    }))
    assert main(["verify", "--config", str(cfgfile)]) == 0
    rows = read_rows(os.path.join(out, "verify.csv"))
    assert rows[0] == ["statement_id", "sample_id", "j", "g", "epsilon",
                       "margin", "passed"]
    ids = {r[0] for r in rows[1:]}
    assert {"lemma2", "non:03", "markov", "non:discriminant"} <= ids
    summary = json.loads(open(os.path.join(out, "summary.json")).read())
    assert summary["non:discriminant"]["fail"] == 0


# -- sweep reproducibility -----------------------------------------------------

@pytest.fixture(scope="module")
def sweep_dirs(tmp_path_factory):
    base = tmp_path_factory.mktemp("sweep")
    out1, out2 = str(base / "a"), str(base / "b")
    cfgfile = base / "cfg.json"
    cfgfile.write_text(json.dumps({
        "spec": {"kind": "uniform", "a": 0.0, "b": 1.0},
        "n": 20, "g_grid": [0.05, 0.1], "epsilon": 0.3,
        "realizations": 3, "seed": 11,
        "lyapunov": {"e_spacing": 0.1, "steps": 5000, "replicas": 4},
        "output_dir": out1,
    }))
    assert main(["sweep", "--config", str(cfgfile)]) == 0
    assert main(["sweep", "--from-manifest",
                 os.path.join(out1, "manifest.json"), "--out", out2]) == 0
    return out1, out2


def test_sweep_artifacts(sweep_dirs):
    out1, _ = sweep_dirs
    for name in ("gamma.csv", "verify.csv", "rates.csv", "fits.csv",
                 "structure.csv", "summary.json", "flow.csv", "manifest.json"):
        assert os.path.exists(os.path.join(out1, name)), name
    summary = json.loads(open(os.path.join(out1, "summary.json")).read())
    agg = summary["aggregates"]
    assert agg["realizations"] == 3
    assert 0.0 <= agg["reality_frequency"] <= 1.0
    assert "statements" in summary
    rows = read_rows(os.path.join(out1, "structure.csv"))
    assert len(rows) == 1 + 3 * 20


def test_sweep_rerun_byte_identical(sweep_dirs):
    out1, out2 = sweep_dirs
    for name in ("gamma.csv", "verify.csv", "rates.csv", "fits.csv",
                 "structure.csv", "summary.json", "flow.csv"):
        a = open(os.path.join(out1, name), "rb").read()
        b = open(os.path.join(out2, name), "rb").read()
        assert a == b, f"{name} differs between identical runs"


def test_plot_deterministic(sweep_dirs, tmp_path):
    out1, _ = sweep_dirs
    p1, p2 = str(tmp_path / "p1"), str(tmp_path / "p2")
    assert main(["plot", "--from", out1, "--out", p1]) == 0
    assert main(["plot", "--from", out1, "--out", p2]) == 0
    for name in ("spectrum.svg", "rates.svg", "bandwidths.svg"):
        a = open(os.path.join(p1, name), "rb").read()
        b = open(os.path.join(p2, name), "rb").read()
        assert len(a) > 0
        assert a == b, f"{name} differs between identical runs"
