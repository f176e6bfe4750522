"""Command-line entry point.

Exit status: 0 on success, 2 for usage or input errors, 3 for domain or
feasibility errors. Data goes to stdout and diagnostics to stderr (one line).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import design, identification, statics
from .errors import InputError, KiriError, ModelDomainError, OutOfRangeError
from .io import (
    PRESETS,
    SIMULATE_HEADER,
    SIMULATED_MARKER,
    ToolConfig,
    fmt,
    format_table,
    load_config,
    read_measurements,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3

PROG = "kiriutensil"


class UsageError(InputError):
    pass


def _float_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")
    if any(not math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError(f"non-finite value in {text!r}")
    return values


def _finite(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return value


def _config(args) -> ToolConfig:
    if args.config is not None:
        cfg = load_config(args.config)
    elif args.preset is not None:
        cfg = PRESETS[args.preset]()
    else:
        raise UsageError("one of --preset or --config is required")
    if args.no_band:
        cfg = cfg.without_band()
    return cfg


def _json_out(doc):
    sys.stdout.write(json.dumps(_clean(doc), indent=2) + "\n")


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


# -- commands -----------------------------------------------------------------

def cmd_simulate(args):
    cfg = _config(args)
    if args.steps < 2:
        raise UsageError("--steps must be >= 2")
    if not args.start < args.end:
        raise UsageError("--from must be smaller than --to")
    limit = statics.operating_range(cfg.geometry).delta_x_max
    if args.start < 0 or args.end > limit:
        raise ModelDomainError(
            f"range [{args.start:.9g}, {args.end:.9g}] mm leaves the operating range "
            f"[0, {limit:.9g}] mm"
        )
    rows = []
    for dx in np.linspace(args.start, args.end, args.steps).tolist():
        st = statics.evaluate_state(cfg.geometry, cfg.spring, cfg.material, cfg.band, dx)
        rows.append(_state_cells(st))
    sys.stdout.write(SIMULATED_MARKER + "\n")
    sys.stdout.write(format_table(SIMULATE_HEADER, rows))


def _state_cells(st):
    return (st.delta_x, st.delta_y, st.kirigami_force, st.band_force,
            st.applied_force, st.pivot_torque)


def cmd_invert(args):
    cfg = _config(args)
    dx, info = statics.invert_applied_force(
        cfg.geometry, cfg.spring, cfg.material, cfg.band, args.force, full_output=True,
    )
    _json_out({
        "target_force_n": args.force,
        "delta_x_mm": dx,
        "iterations": info.iterations,
        "residual_n": info.residual,
        "delta_x_max_mm": info.window.delta_x_max,
    })


def _load_series(args):
    series, inputs = [], []
    for path in args.files:
        loaded = read_measurements(path)
        if any(s.synthetic for s in loaded) and not args.allow_synthetic:
            raise InputError(
                f"{path}: file is marked '{SIMULATED_MARKER[2:]}'; "
                "pass --allow-synthetic to fit model-generated data"
            )
        inputs.append({
            "file": Path(path).name,
            "rows": sum(len(s) for s in loaded),
            "series": len(loaded),
        })
        series.extend(loaded)
    if args.average:
        series = _average_groups(series)
    return series, inputs


def _average_groups(series):
    groups = {}
    for s in series:
        groups.setdefault((s.material, s.size_scale), []).append(s)
    return [identification.average_trials(g) for g in groups.values()]


def _fit_doc(fit):
    return {
        "constant": fit.constant,
        "r_squared": fit.r_squared,
        "n_points": fit.n_points,
        "max_abs_residual": fit.max_abs_residual,
        "free_slope": fit.free_slope,
        "free_intercept": fit.free_intercept,
        "n_series": fit.n_series,
        "n_trials": fit.n_trials,
    }


def cmd_fit_spring(args):
    series, inputs = _load_series(args)
    fit = identification.fit_spring_constant_pooled(series)
    _json_out({"mode": "spring", "units": "N/mm", **_fit_doc(fit), "inputs": inputs})


def cmd_fit_kk(args):
    series, inputs = _load_series(args)
    fit = identification.fit_kirigami_stiffness_factor(series)
    _json_out({"mode": "kk", "units": "mm", **_fit_doc(fit), "inputs": inputs})


def cmd_scale_report(args):
    series, inputs = _load_series(args)
    rep = identification.scale_invariance_report(series, threshold=args.threshold)
    _json_out({
        "mode": "scale-report",
        "units": "mm",
        "groups": [{"size_scale": s, **_fit_doc(f)} for s, f in rep.groups.items()],
        "spread": rep.spread,
        "threshold": rep.threshold,
        "consistent": rep.consistent,
        "inputs": inputs,
    })


def cmd_design(args):
    cfg = _config(args)
    if args.objective == "modulus":
        target = design.DesignTarget(args.force, args.at, design.Objective.SOLVE_MODULUS)
        mat = design.solve_material_modulus(cfg.geometry, cfg.spring, cfg.band, target)
        doc = {"youngs_modulus_mpa": mat.youngs_modulus}
    else:
        target = design.DesignTarget(args.force, args.at, design.Objective.SOLVE_BAND_STIFFNESS)
        band = design.solve_band_stiffness(cfg.geometry, cfg.spring, cfg.material, target)
        doc = {
            "band_stiffness_n_per_mm": band.stiffness,
            "band_present": band.present,
            "band_unnecessary": not band.present,
        }
    _json_out({
        "objective": target.objective.value,
        "target_force_n": target.target_applied_force,
        "at_displacement_mm": target.at_displacement,
        **doc,
    })


SWEEP_HEADER = ("youngs_modulus_mpa", "band_stiffness_n_per_mm", "scale") + SIMULATE_HEADER + (
    "delta_x_max_mm", "error")


def cmd_sweep(args):
    cfg = _config(args)
    grid = {"delta_x": args.dx}
    if args.e is not None:
        grid["youngs_modulus"] = args.e
    if args.kb is not None:
        grid["band_stiffness"] = args.kb
    if args.scale is not None:
        grid["scale"] = args.scale
    rows = design.parameter_sweep(cfg.geometry, cfg.spring, cfg.band, grid, material=cfg.material)
    cells = [
        (r.youngs_modulus, "" if r.band_stiffness is None else fmt(r.band_stiffness), r.scale,
         r.delta_x, r.delta_y, r.kirigami_force, r.band_force, r.applied_force,
         r.pivot_torque, r.delta_x_max, r.error or "")
        for r in rows
    ]
    sys.stdout.write(SIMULATED_MARKER + "\n")
    sys.stdout.write(format_table(SWEEP_HEADER, cells))


def cmd_torque_profile(args):
    cfg = _config(args)
    if args.points is not None:
        traj = design.ClosureTrajectory.from_displacements(args.points)
    elif args.peg_radius is not None:
        if args.sweep_angle is None:
            raise UsageError("--peg-radius needs --sweep-angle")
        traj = design.ClosureTrajectory.from_peg_arc(
            args.peg_radius, math.radians(args.rest_angle), math.radians(args.sweep_angle),
            args.steps,
        )
    elif args.start is not None and args.end is not None:
        traj = design.ClosureTrajectory.linear(args.start, args.end, args.steps)
    else:
        raise UsageError("give --points, --from/--to, or --peg-radius/--sweep-angle")
    prof = design.torque_profile(
        cfg.geometry, cfg.spring, cfg.material, cfg.band, traj,
        gear_ratio=args.gear_ratio, safety_factor=args.safety_factor,
    )
    comments = [
        SIMULATED_MARKER[2:],
        f"peak_torque_nmm={fmt(prof.peak_torque)}",
        f"gear_ratio={fmt(prof.gear_ratio)}",
        f"safety_factor={fmt(prof.safety_factor)}",
        f"required_motor_torque_nmm={fmt(prof.required_motor_torque)}",
    ]
    sys.stdout.write(format_table(("phase", "delta_x_mm", "torque_nmm"), prof.samples, comments))


# -- parser -------------------------------------------------------------------

def _add_config_args(p):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=sorted(PRESETS), help="built-in constant set")
    src.add_argument("--config", metavar="PATH", help="JSON configuration file")
    p.add_argument("--no-band", action="store_true", help="drop the band from the configuration")


def _add_fit_args(p):
    p.add_argument("files", nargs="+", metavar="CSV")
    p.add_argument("--allow-synthetic", action="store_true",
                   help="accept files marked as model-generated")
    p.add_argument("--average", action="store_true",
                   help="average trials sharing material and size before fitting")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="force-displacement curve as CSV")
    _add_config_args(p)
    p.add_argument("--from", dest="start", type=_finite, required=True, metavar="MM")
    p.add_argument("--to", dest="end", type=_finite, required=True, metavar="MM")
    p.add_argument("--steps", type=int, required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("invert", help="displacement reached at a handle force")
    _add_config_args(p)
    p.add_argument("--force", type=_finite, required=True, metavar="N")
    p.set_defaults(func=cmd_invert, json_errors=True)

    for name, func, hlp in (("fit-spring", cmd_fit_spring, "fit a spring constant (N/mm)"),
                            ("fit-kk", cmd_fit_kk, "fit the kirigami stiffness factor (mm)")):
        p = sub.add_parser(name, help=hlp)
        _add_fit_args(p)
        p.set_defaults(func=func, json_errors=True)

    p = sub.add_parser("scale-report", help="compare stiffness factors across sizes")
    _add_fit_args(p)
    p.add_argument("--threshold", type=_finite, default=identification.DEFAULT_SPREAD_THRESHOLD)
    p.set_defaults(func=cmd_scale_report, json_errors=True)

    p = sub.add_parser("design", help="solve for modulus or band stiffness")
    _add_config_args(p)
    p.add_argument("--objective", choices=("modulus", "band"), required=True)
    p.add_argument("--force", type=_finite, required=True, metavar="N")
    p.add_argument("--at", type=_finite, required=True, metavar="MM")
    p.set_defaults(func=cmd_design, json_errors=True)

    p = sub.add_parser("sweep", help="evaluate a parameter grid")
    _add_config_args(p)
    p.add_argument("--dx", type=_float_list, required=True, metavar="LIST")
    p.add_argument("--e", type=_float_list, metavar="LIST", help="Young's moduli, MPa")
    p.add_argument("--kb", type=_float_list, metavar="LIST", help="band stiffnesses, N/mm")
    p.add_argument("--scale", type=_float_list, metavar="LIST")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("torque-profile", help="pivot torque along a closing trajectory")
    _add_config_args(p)
    p.add_argument("--points", type=_float_list, metavar="LIST")
    p.add_argument("--from", dest="start", type=_finite, metavar="MM")
    p.add_argument("--to", dest="end", type=_finite, metavar="MM")
    p.add_argument("--steps", type=int, default=11)
    p.add_argument("--peg-radius", type=_finite, metavar="MM")
    p.add_argument("--rest-angle", type=_finite, default=0.0, metavar="DEG")
    p.add_argument("--sweep-angle", type=_finite, metavar="DEG")
    p.add_argument("--gear-ratio", type=_finite, default=design.DEFAULT_GEAR_RATIO)
    p.add_argument("--safety-factor", type=_finite, default=design.DEFAULT_SAFETY_FACTOR)
    p.set_defaults(func=cmd_torque_profile)
    return parser


def _error_doc(exc):
    err = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, OutOfRangeError):
        key = "peak_force_n" if exc.above else "rest_force_n"
        err[key] = exc.limit_force
    return {"error": err}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except KiriError as exc:
        code = EXIT_DOMAIN if isinstance(exc, ModelDomainError) else EXIT_USAGE
        if getattr(args, "json_errors", False):
            _json_out(_error_doc(exc))
        msg = " ".join(str(exc).split())
        print(f"{PROG} {args.command}: error: {msg}", file=sys.stderr)
        return code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
