import json

import pytest

from nilmin.cli import config_load, main, run
from nilmin.errors import ConfigError


def _write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def _grid(**kw):
    grid = {"x_min": -0.4, "x_max": 0.4, "y_min": -0.4, "y_max": 0.4, "nx": 7, "ny": 7}
    grid.update(kw)
    return grid


def test_minimal_bscroll_config_defaults(tmp_path):
    path = _write(tmp_path, "c.json", {
        "mode": "bscroll", "tau": 1.0,
        "bscroll": {"kappa": 2.0, "s_range": [0.0, 1.0], "t_range": [-3.0, -1.0],
                    "step": 0.01},
    })
    config = config_load(path)
    assert config["tolerances"] == {"level": 1e-9, "classify": 1e-7, "loop": 1e-6}
    assert config["outputs"]["report"] is None
    assert config["bscroll"]["init_frame"] is None


def test_grid_base_defaults_to_center(tmp_path):
    path = _write(tmp_path, "c.json", {
        "mode": "validate", "gauss_map": "conj(z)", "tau": 1.0, "grid": _grid(),
    })
    spec = config_load(path)["grid"]
    assert spec.base == (0.0, 0.0)


def test_tau_zero_rejected(tmp_path):
    path = _write(tmp_path, "c.json", {
        "mode": "validate", "gauss_map": "z", "tau": 0, "grid": _grid(),
    })
    with pytest.raises(ConfigError) as ei:
        config_load(path)
    assert ei.value.pointer == "/tau"


def test_unknown_key_suggestion(tmp_path):
    path = _write(tmp_path, "c.json", {
        "mode": "validate", "gaussmap": "z", "tau": 1.0, "grid": _grid(),
    })
    with pytest.raises(ConfigError) as ei:
        config_load(path)
    assert "gauss_map" in str(ei.value)


def test_bad_grid_counts(tmp_path):
    path = _write(tmp_path, "c.json", {
        "mode": "validate", "gauss_map": "z", "tau": 1.0, "grid": _grid(nx=1),
    })
    with pytest.raises(ConfigError):
        config_load(path)


def test_exit_codes(tmp_path):
    ok = _write(tmp_path, "ok.json", {
        "mode": "validate", "gauss_map": "conj(z)", "tau": 1.0, "grid": _grid(),
    })
    assert main(["--config", ok]) == 0

    bad = _write(tmp_path, "bad.json", {"mode": "validate", "tau": 1.0})
    assert main(["--config", bad]) == 2

    nonharm = _write(tmp_path, "nh.json", {
        "mode": "classify", "gauss_map": "z*conj(z)", "tau": 1.0, "grid": _grid(),
    })
    assert main(["--config", nonharm]) == 3

    assert main(["--config", str(tmp_path / "missing.json")]) == 4

    unwritable = _write(tmp_path, "io.json", {
        "mode": "validate", "gauss_map": "conj(z)", "tau": 1.0, "grid": _grid(),
        "outputs": {"report": "/nonexistent-dir/report.json"},
    })
    assert main(["--config", unwritable]) == 4


def test_validate_reports_residuals(tmp_path):
    path = _write(tmp_path, "c.json", {
        "mode": "validate", "gauss_map": "conj(z)", "tau": 1.0, "grid": _grid(),
        "outputs": {"report": "r.json"},
    })
    assert main(["--config", path, "--out-dir", str(tmp_path / "out")]) == 0
    report = json.loads((tmp_path / "out" / "r.json").read_text())
    assert report["residuals"]["harmonic"] < 1e-12
    assert report["residuals"]["dirac"] < 1e-12


def test_classify_outputs(tmp_path):
    path = _write(tmp_path, "c.json", {
        "mode": "classify", "gauss_map": "conj(z)", "tau": 1.0,
        "grid": {"x_min": 0.5, "x_max": 2.0, "y_min": -1.0, "y_max": 1.0,
                 "nx": 13, "ny": 13},
        "outputs": {"report": "r.json", "curves": "curves.csv", "mesh_nil": "m.obj"},
    })
    out = tmp_path / "out"
    assert main(["--config", path, "--out-dir", str(out)]) == 0
    lines = (out / "curves.csv").read_text().splitlines()
    assert lines[0] == "t,x,y,kind"
    assert all(ln.endswith("NonFront") for ln in lines[1:])
    report = json.loads((out / "r.json").read_text())
    assert report["singular_points"]
    assert (out / "m.obj").read_text().startswith("v ")


def test_determinism(tmp_path):
    cfg = {
        "mode": "classify", "gauss_map": "conj(z)", "tau": 1.0,
        "grid": {"x_min": 0.5, "x_max": 2.0, "y_min": -1.0, "y_max": 1.0,
                 "nx": 13, "ny": 13},
        "outputs": {"report": "r.json", "curves": "c.csv", "mesh_nil": "m.obj",
                    "mesh_mink": "mm.obj"},
    }
    path = _write(tmp_path, "c.json", cfg)
    outs = []
    for run_dir in ("a", "b"):
        out = tmp_path / run_dir
        assert main(["--config", path, "--out-dir", str(out)]) == 0
        report = json.loads((out / "r.json").read_text())
        report.pop("timing")
        outs.append((
            json.dumps(report, sort_keys=True),
            (out / "c.csv").read_bytes(),
            (out / "m.obj").read_bytes(),
            (out / "mm.obj").read_bytes(),
        ))
    assert outs[0] == outs[1]


def test_run_bscroll_reports_swallowtails(tmp_path):
    cfg = config_load(_write(tmp_path, "c.json", {
        "mode": "bscroll", "tau": 1.0,
        "bscroll": {"kappa": 2.0, "s_range": [0.1, 1.2], "t_range": [-3.5, -1.5],
                    "step": 0.001},
        "outputs": {"report": "r.json", "curves": "c.csv"},
    }))
    report = run(cfg, str(tmp_path))
    kinds = [p["kind"] for p in report["special_points"]]
    assert "Swallowtail" in kinds
    assert (tmp_path / "c.csv").read_text().startswith("t,x,y,kind")


def test_mode_field_mismatch(tmp_path):
    path = _write(tmp_path, "c.json", {
        "mode": "validate", "gauss_map": "z", "tau": 1.0, "grid": _grid(),
        "bscroll": {"kappa": 1.0, "s_range": [0, 1], "t_range": [0, 1], "step": 0.1},
    })
    with pytest.raises(ConfigError):
        config_load(path)
