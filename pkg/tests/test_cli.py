"""CLI: config parsing, round-trips, commands, exit codes."""

import json
import math
import os

import numpy as np
import pytest

from pdmmap.cli import (ModelConfig, load_config, main, toml_dumps,
                        toml_loads)
from pdmmap.maps import make_family
from pdmmap.basemodels import AnisotropicOscillator, oscillator_state
from pdmmap.pdm import PDMModel, TransformedState
from pdmmap.verify import eigen_residual, field_from_csv, grid_for_model

W2 = math.sqrt(2.0)

EX1 = {
    "family": {"name": "log", "alpha": 1.0, "gamma": 1.0, "delta": 0.0},
    "base": {"name": "oscillator", "omega1": 1.0, "omega2": W2},
    "state": {"n1": 0, "n2": 0},
    "grid": {"origin": [-3.0, -3.0], "h": 0.05, "nx": 101, "ny": 121},
    "checks": {"names": ["metric", "eigen_residual", "symmetry"]},
    "outputs": {"fields": ["M", "U", "psi"]},
}


def write_cfg(tmp_path, data, name="cfg.toml"):
    path = os.path.join(tmp_path, name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(toml_dumps(data))
    return path


def test_config_roundtrip_identity(tmp_path):
    cfg = ModelConfig(toml_loads(toml_dumps(EX1)))
    text = toml_dumps(cfg.to_dict())
    again = ModelConfig(toml_loads(text))
    assert again.to_dict() == cfg.to_dict()
    assert toml_dumps(again.to_dict()) == text


def test_unknown_key_rejected(tmp_path):
    bad = dict(EX1)
    bad["extra"] = {"x": 1}
    path = write_cfg(tmp_path, bad)
    assert main(["model", "show", path]) == 2


def test_missing_physical_parameter_rejected(tmp_path):
    bad = json.loads(json.dumps(EX1))
    del bad["family"]["gamma"]
    path = write_cfg(tmp_path, bad)
    assert main(["model", "show", path]) == 2


def test_unknown_family_exit_code(tmp_path):
    bad = json.loads(json.dumps(EX1))
    bad["family"] = {"name": "frobnicate"}
    path = write_cfg(tmp_path, bad)
    assert main(["model", "show", path]) == 2


def test_model_show_prints_energy(tmp_path, capsys):
    path = write_cfg(tmp_path, EX1)
    assert main(["model", "show", path]) == 0
    out = capsys.readouterr().out
    assert "log" in out
    assert "%.6f" % (1.0 + W2) in out or "2.41421" in out


def test_export_and_reimport_bit_exact(tmp_path):
    path = write_cfg(tmp_path, EX1)
    outdir = os.path.join(tmp_path, "out")
    assert main(["export", path, "--out", outdir]) == 0
    for stem in ("M", "U", "psi_0_0"):
        assert os.path.exists(os.path.join(outdir, stem + ".csv"))
    # in-memory comparison for M
    cfg = load_config(path)
    model = cfg.model()
    grid = cfg.grid(model)
    from pdmmap.cli import field_on_grid
    f = field_on_grid(model, grid, "M")
    _, _, vals = field_from_csv(os.path.join(outdir, "M.csv"))
    assert np.array_equal(vals, f.values.ravel())


def test_verify_strip_model_passes(tmp_path):
    # residual-style checks on a moderate box
    cfg1 = json.loads(json.dumps(EX1))
    cfg1["grid"] = {"origin": [-3.0, -3.0], "h": 0.02, "nx": 251, "ny": 301}
    path1 = write_cfg(tmp_path, cfg1, "a.toml")
    assert main(["verify", path1, "--out", str(tmp_path)]) == 0

    # global checks (normalization, hermiticity) on the wide strip
    h = 4.0 * math.pi / 252
    cfg2 = json.loads(json.dumps(EX1))
    cfg2["grid"] = {"origin": [-35.0, -2.0 * math.pi], "h": h,
                    "nx": int(round(38.0 / h)) + 1, "ny": 252,
                    "periodic_y2": True}
    cfg2["checks"] = {"names": ["normalization", "hermiticity"]}
    path2 = write_cfg(tmp_path, cfg2, "b.toml")
    assert main(["verify", path2, "--out", str(tmp_path)]) == 0
    report = json.load(open(os.path.join(tmp_path, "report.json")))
    assert all(e["pass"] for e in report["entries"])


def test_verify_radial_model_with_origin_mask(tmp_path):
    cfg = {
        "family": {"name": "quadratic", "a": 0.125},
        "base": {"name": "oscillator", "omega1": 1.0, "omega2": W2},
        "state": {"n1": 0, "n2": 0},
        "grid": {"origin": [-6.5, -6.5], "h": 0.05, "nx": 261, "ny": 261,
                 "annulus": [0.3, 6.0]},
        "checks": {"names": ["metric", "eigen_residual", "symmetry",
                             "hermiticity"]},
    }
    path = write_cfg(tmp_path, cfg)
    assert main(["verify", path, "--out", str(tmp_path),
                 "--tol-scale", "10"]) == 0


def test_corrupted_energy_fails_residual():
    fam = make_family("log", alpha=1.0, gamma=1.0, delta=0.0)
    model = PDMModel(fam, AnisotropicOscillator(omega1=1.0, omega2=W2))
    ts = TransformedState(model, oscillator_state(1.0, W2, 0, 0))

    class Corrupted:
        energy = ts.energy + 0.1

        def eval(self, y):
            return ts.eval(y)

    g = grid_for_model(model, (-3.0, -3.0), 0.05, 101, 121)
    good = eigen_residual(model, ts, g)
    bad = eigen_residual(model, Corrupted(), g)
    assert good <= 5e-3
    assert bad > 5e-3


def test_grid_outside_strip_is_numerical_error(tmp_path):
    cfg = json.loads(json.dumps(EX1))
    cfg["grid"] = {"origin": [-3.0, -3.0], "h": 0.1, "nx": 41, "ny": 200}
    path = write_cfg(tmp_path, cfg)
    assert main(["verify", path, "--out", str(tmp_path)]) == 3


def test_figures_preset(tmp_path):
    assert main(["figures", "fig3", "--out", str(tmp_path)]) == 0
    assert os.path.exists(os.path.join(tmp_path, "fig3_psi_0_0.csv"))


def test_bad_toml_syntax(tmp_path):
    path = os.path.join(tmp_path, "broken.toml")
    with open(path, "w") as fh:
        fh.write("[family\nname=")
    assert main(["model", "show", path]) == 2
