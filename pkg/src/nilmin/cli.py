"""Command line entry point.

Everything geometric lives in one JSON config; the flags only steer
paths and verbosity.  Exit codes: 0 success, 2 config error, 3
numerical failure, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import difflib
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .bscroll import (
    DEFAULT_INIT_FRAME,
    CurvatureProfile,
    FrameState,
    classify_scroll,
    frame_invariant_drift,
    integrate_frame,
    reconstruct_nil,
    scroll_eval,
    singular_parameter,
)
from .errors import (
    ConfigError,
    IoError,
    LostCurve,
    NilminError,
    NonClosedForm,
    NonHarmonicInput,
)
from .grids import GridSpec
from .harmonic import ClosedFormField, dirac_residuals, harmonic_residual, pc_mag
from .singular import classify_sigma_g, classify_sigma_omega, curves_to_csv, detect, trace_curve
from .surface import export_mesh, integrate_minkowski, integrate_nil, loop_residual

__all__ = ["main", "run", "config_load"]

_MODES = ("validate", "synthesize", "classify", "bscroll")
_DEFAULT_TOLERANCES = {"level": 1e-9, "classify": 1e-7, "loop": 1e-6}


def _reject_unknown(obj, allowed, pointer):
    for key in obj:
        if key not in allowed:
            hint = difflib.get_close_matches(key, allowed, n=1)
            msg = f"unknown key {key!r}"
            if hint:
                msg += f"; did you mean {hint[0]!r}?"
            raise ConfigError(msg, f"{pointer}/{key}")


def _need(obj, key, types, pointer):
    if key not in obj:
        raise ConfigError(f"missing required key {key!r}", f"{pointer}/{key}")
    value = obj[key]
    if not isinstance(value, types):
        raise ConfigError(f"key {key!r} has the wrong type", f"{pointer}/{key}")
    return value


def _opt(obj, key, types, pointer, default=None):
    if key not in obj:
        return default
    value = obj[key]
    if not isinstance(value, types):
        raise ConfigError(f"key {key!r} has the wrong type", f"{pointer}/{key}")
    return value


_NUM = (int, float)


def _parse_grid(raw):
    _reject_unknown(raw, ("x_min", "x_max", "y_min", "y_max", "nx", "ny", "base"), "/grid")
    vals = {k: _need(raw, k, _NUM, "/grid") for k in ("x_min", "x_max", "y_min", "y_max")}
    nx = _need(raw, "nx", int, "/grid")
    ny = _need(raw, "ny", int, "/grid")
    if nx < 2 or ny < 2:
        raise ConfigError("nx and ny must be at least 2", "/grid/nx")
    base = _opt(raw, "base", list, "/grid")
    if base is not None:
        if len(base) != 2 or not all(isinstance(v, _NUM) for v in base):
            raise ConfigError("base must be [x, y]", "/grid/base")
        base = tuple(float(v) for v in base)
    try:
        return GridSpec(vals["x_min"], vals["x_max"], vals["y_min"], vals["y_max"],
                        nx, ny, base)
    except ValueError as exc:
        raise ConfigError(str(exc), "/grid") from exc


def _parse_bscroll(raw):
    _reject_unknown(
        raw, ("kappa", "s_range", "t_range", "step", "init_frame"), "/bscroll"
    )
    kappa = _need(raw, "kappa", (str, int, float), "/bscroll")
    s_range = _need(raw, "s_range", list, "/bscroll")
    t_range = _need(raw, "t_range", list, "/bscroll")
    for name, rng in (("s_range", s_range), ("t_range", t_range)):
        if len(rng) != 2 or not all(isinstance(v, _NUM) for v in rng):
            raise ConfigError(f"{name} must be [lo, hi]", f"/bscroll/{name}")
        if not rng[1] > rng[0]:
            raise ConfigError(f"{name} must be increasing", f"/bscroll/{name}")
    step = _need(raw, "step", _NUM, "/bscroll")
    if step <= 0:
        raise ConfigError("step must be positive", "/bscroll/step")
    init = _opt(raw, "init_frame", dict, "/bscroll")
    frame = None
    if init is not None:
        _reject_unknown(init, ("s", "A", "B", "C"), "/bscroll/init_frame")
        try:
            frame = FrameState(
                _opt(init, "s", _NUM, "/bscroll/init_frame", 0.0),
                _need(init, "A", list, "/bscroll/init_frame"),
                _need(init, "B", list, "/bscroll/init_frame"),
                _need(init, "C", list, "/bscroll/init_frame"),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc), "/bscroll/init_frame") from exc
    return {
        "kappa": kappa,
        "s_range": (float(s_range[0]), float(s_range[1])),
        "t_range": (float(t_range[0]), float(t_range[1])),
        "step": float(step),
        "init_frame": frame,
    }


def config_load(path):
    """Strict schema load: unknown keys rejected, defaults filled."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}", "/") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object", "/")
    _reject_unknown(
        raw,
        ("mode", "gauss_map", "grid", "tau", "bscroll", "tolerances", "outputs"),
        "",
    )
    mode = _need(raw, "mode", str, "")
    if mode not in _MODES:
        raise ConfigError(f"mode must be one of {_MODES}", "/mode")
    tau = _need(raw, "tau", _NUM, "")
    if tau == 0:
        raise ConfigError("tau must be non-zero", "/tau")

    tol = dict(_DEFAULT_TOLERANCES)
    raw_tol = _opt(raw, "tolerances", dict, "")
    if raw_tol is not None:
        _reject_unknown(raw_tol, tuple(tol), "/tolerances")
        for k in tol:
            tol[k] = float(_opt(raw_tol, k, _NUM, "/tolerances", tol[k]))

    outputs = {"mesh_nil": None, "mesh_mink": None, "report": None, "curves": None}
    raw_out = _opt(raw, "outputs", dict, "")
    if raw_out is not None:
        _reject_unknown(raw_out, tuple(outputs), "/outputs")
        for k in outputs:
            outputs[k] = _opt(raw_out, k, str, "/outputs")

    config = {
        "mode": mode,
        "tau": float(tau),
        "tolerances": tol,
        "outputs": outputs,
        "echo": raw,
    }
    if mode == "bscroll":
        config["bscroll"] = _parse_bscroll(_need(raw, "bscroll", dict, ""))
        if "gauss_map" in raw or "grid" in raw:
            raise ConfigError("gauss_map/grid do not apply to bscroll mode", "/mode")
    else:
        config["gauss_map"] = _need(raw, "gauss_map", str, "")
        config["grid"] = _parse_grid(_need(raw, "grid", dict, ""))
        if "bscroll" in raw:
            raise ConfigError("bscroll section requires bscroll mode", "/bscroll")
    return config


def _out_path(outputs, key, out_dir):
    path = outputs.get(key)
    if path is None:
        return None
    if out_dir and not os.path.isabs(path):
        path = os.path.join(out_dir, path)
    return path


def _field_residuals(field, spec):
    worst_h = 0.0
    worst_d = 0.0
    for _i, _j, x, y in spec.nodes():
        s = field.sample_xy(x, y)
        worst_h = max(worst_h, pc_mag(harmonic_residual(s)))
        r1, r2 = dirac_residuals(s)
        worst_d = max(worst_d, pc_mag(r1), pc_mag(r2))
    return worst_h, worst_d


def _run_field_modes(config, out_dir, report):
    field = ClosedFormField(config["gauss_map"], config["tau"])
    spec = config["grid"]
    tol = config["tolerances"]
    worst_h, worst_d = _field_residuals(field, spec)
    report["residuals"] = {"harmonic": worst_h, "dirac": worst_d}
    if config["mode"] == "validate":
        return []
    if worst_h > tol["loop"]:
        raise NonHarmonicInput(
            f"max harmonic residual {worst_h:.3e} exceeds {tol['loop']:.3e}"
        )
    grid = integrate_nil(field, spec, harmonic_tol=tol["loop"])
    integrate_minkowski(field, spec, grid=grid, harmonic_tol=tol["loop"])
    report["residuals"]["loop_nil"] = loop_residual(field, spec, "nil")
    report["residuals"]["loop_mink"] = loop_residual(field, spec, "mink")
    mesh_nil = _out_path(config["outputs"], "mesh_nil", out_dir)
    if mesh_nil:
        export_mesh(grid.positions_nil, mesh_nil)
    mesh_mink = _out_path(config["outputs"], "mesh_mink", out_dir)
    if mesh_mink:
        export_mesh(grid.positions_mink, mesh_mink)
    if config["mode"] == "synthesize":
        return []

    points = detect(field, spec, tol["level"], tol["classify"])
    bounds = (spec.x_min, spec.x_max, spec.y_min, spec.y_max)
    step = 0.25 * min(spec.dx, spec.dy)
    classified = []
    seen = []
    for p in points:
        if p.stratum == "both":
            classified.append(p)
            continue
        if any(p.stratum == st and abs(p.z.re - q.re) + abs(p.z.im - q.im) < 4 * step
               for st, q in seen):
            continue
        curve = trace_curve(field, p, step=step, bounds=bounds)
        if p.stratum == "sigma_g":
            classified.extend(classify_sigma_g(curve, field, tol["classify"]))
        else:
            classified.extend(classify_sigma_omega(curve, field, tol["classify"]))
        seen.extend((p.stratum, q.z) for q in curve.points)
    curves_path = _out_path(config["outputs"], "curves", out_dir)
    if curves_path:
        curves_to_csv(classified, curves_path)
    return classified


def _run_bscroll(config, out_dir, report):
    bc = config["bscroll"]
    profile = CurvatureProfile(bc["kappa"], config["tau"])
    init = bc["init_frame"] or DEFAULT_INIT_FRAME
    result = integrate_frame(profile, bc["s_range"], h=bc["step"], init=init)
    report["residuals"] = {"frame_drift": frame_invariant_drift(result)}
    classification = classify_scroll(result, classify_tol=config["tolerances"]["classify"])
    t_vals = np.linspace(bc["t_range"][0], bc["t_range"][1], 33)
    stride = max(1, len(result.s_vals) // 200)
    grid = scroll_eval(result, t_vals, s_stride=stride)
    try:
        reconstruct_nil(grid, loop_tol=max(config["tolerances"]["loop"], 1e-7))
        report["residuals"]["loop_nil_form"] = grid.loop_residual
        report["reconstruction"] = {
            "hodge_sign": grid.sigma,
            "normal_sign": grid.n_sign,
            "chart_swapped": grid.chart_swap,
        }
    except NonClosedForm:
        raise
    mesh_nil = _out_path(config["outputs"], "mesh_nil", out_dir)
    if mesh_nil and grid.f_nil is not None:
        export_mesh(np.swapaxes(grid.f_nil, 0, 1), mesh_nil)
    mesh_mink = _out_path(config["outputs"], "mesh_mink", out_dir)
    if mesh_mink:
        export_mesh(np.swapaxes(grid.f_L, 0, 1), mesh_mink)

    rows = []
    specials = []
    for s_seg, kinds in classification.segments:
        t_s, _ = singular_parameter(result)
        for sv, kv in zip(s_seg[::10], kinds[::10]):
            idx = int(np.argmin(np.abs(result.s_vals - sv)))
            rows.append((sv, sv, t_s[idx], kv))
    for sp in classification.specials:
        rows.append((sp["s"], sp["s"], sp["t"], sp["kind"]))
        specials.append({"s": sp["s"], "t": sp["t"], "kind": sp["kind"]})
    rows.sort(key=lambda r: r[0])
    curves_path = _out_path(config["outputs"], "curves", out_dir)
    if curves_path:
        try:
            with open(curves_path, "w") as fh:
                fh.write("t,x,y,kind\n")
                for t, x, y, kind in rows:
                    fh.write(f"{t:.12g},{x:.17g},{y:.17g},{kind}\n")
        except OSError as exc:
            raise IoError(str(exc)) from exc
    report["special_points"] = specials
    return rows


def run(config, out_dir=None, verbose=False):
    """Execute one configured pipeline; returns the report dict."""
    start = time.time()
    report = {
        "mode": config["mode"],
        "version": __version__,
        "config": config["echo"],
    }
    if config["mode"] == "bscroll":
        _run_bscroll(config, out_dir, report)
    else:
        classified = _run_field_modes(config, out_dir, report)
        if config["mode"] == "classify":
            report["singular_points"] = [
                {
                    "x": p.z.re,
                    "y": p.z.im,
                    "stratum": p.stratum,
                    "kind": p.kind,
                    "nondegenerate": p.nondegenerate,
                }
                for p in classified
            ]
    report["timing"] = time.time() - start
    report_path = _out_path(config["outputs"], "report", out_dir)
    if report_path:
        try:
            with open(report_path, "w") as fh:
                json.dump(report, fh, indent=2, sort_keys=True, default=float)
                fh.write("\n")
        except OSError as exc:
            raise IoError(str(exc)) from exc
    if verbose:
        json.dump(report, sys.stderr, indent=2, sort_keys=True, default=float)
        sys.stderr.write("\n")
    return report


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="nilmin",
        description="Timelike minimal surfaces in Nil_3 and their singularities",
    )
    parser.add_argument("--config", required=True, help="JSON configuration file")
    parser.add_argument("--out-dir", default=None, help="directory for output files")
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)

    try:
        config = config_load(args.config)
        if args.out_dir:
            os.makedirs(args.out_dir, exist_ok=True)
        run(config, args.out_dir, args.verbose)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except IoError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    except NilminError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
