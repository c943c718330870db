"""Command-line entry points: run, sweep, validate, presets.

Outputs are byte-stable: floats are printed in canonical scientific
notation with 17 significant digits, keys and rows are emitted in a fixed
order, and nothing depends on randomness or worker count, so identical
configurations produce identical files.
"""
from __future__ import annotations

import argparse
import hashlib
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__, units
from .config import (ConfigError, RunConfig, apply_axis_value,
                     canonical_text, execute, format_float, load_config,
                     preset_config, PRESETS)
from .model import build_grid, LevelScheme, validate_resolution
from .observables import ObservableTrace
from .units import au_to_ev, au_to_fs

SWEEP_AXES = ("Omega2", "intensity", "t_m", "dt_delay", "omega")
WORKERS_ENV = "ZENOAUGER_WORKERS"

EXIT_OK = 0
EXIT_FIT_FLAGGED = 1
EXIT_CONFIG = 2


def _json_text(obj, indent: int = 0) -> str:
    """Deterministic JSON with canonical float formatting."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}"{key}": {_json_text(obj[key], indent + 1)}'
                 for key in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{_json_text(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isinf(obj):
            return '"inf"'
        return format_float(obj)
    if obj is None:
        return "null"
    return '"' + str(obj).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _write(path: Path, text: str):
    path.write_text(text, encoding="utf-8")


def _trace_csv(trace: ObservableTrace) -> str:
    lines = ["t_fs,n_c,n_v1,n_v2,n_v3,P1,P2,P_bound,cycle_boundary"]
    for i, t in enumerate(trace.times):
        row = [format_float(au_to_fs(float(t)))]
        row += [format_float(float(arr[i])) for arr in
                (trace.n_c, trace.n_v1, trace.n_v2, trace.n_v3,
                 trace.P1, trace.P2, trace.P_bound)]
        row.append("1" if trace.cycle_flags[i] else "0")
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _spectrum_csv(trace: ObservableTrace) -> str:
    lines = ["t_fs,region,eps_eV,A,A_per_eV"]
    for t_snap, a_s, a_p in trace.spectra:
        t_fs = format_float(au_to_fs(float(t_snap)))
        for region, energies, a, d_eps in (
                ("S", trace.energies_s, a_s, trace.d_eps_s),
                ("P", trace.energies_p, a_p, trace.d_eps_p)):
            for eps, weight in zip(energies, a):
                lines.append(",".join((
                    t_fs, region,
                    format_float(au_to_ev(float(eps))),
                    format_float(float(weight)),
                    format_float(float(weight) / au_to_ev(d_eps)),
                )))
    return "\n".join(lines) + "\n"


def _summary(result) -> dict:
    fit = result.fit
    return {
        "fit": {
            "tau_eff_fs": au_to_fs(fit.tau_eff) if math.isfinite(fit.tau_eff)
                          else math.inf,
            "tau_one_over_e_fs": au_to_fs(fit.tau_one_over_e)
                                 if math.isfinite(fit.tau_one_over_e)
                                 else math.inf,
            "r_squared": fit.r_squared,
            "accepted": fit.accepted,
            "method": fit.method,
            "fit_window_fs": [au_to_fs(fit.fit_window[0]),
                              au_to_fs(fit.fit_window[1])],
        },
        "peaks": [
            {
                "region": p.region,
                "position_eV": au_to_ev(p.position),
                "height_per_eV": p.height / units.HARTREE_EV,
                "width_eV": au_to_ev(p.width) if math.isfinite(p.width)
                            else math.inf,
            }
            for p in result.peaks
        ],
        "splittings_eV": {
            region: [au_to_ev(s) for s in values]
            for region, values in result.splittings.items()
        },
        "norm_error": result.trace.norm_error(),
        "sum_rule_error": result.trace.sum_rule_error(),
        "warnings": list(result.warnings),
    }


def emit(result, out_dir: str | Path) -> Path:
    """Write trace, spectrum, summary, expanded config and provenance."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    expanded = canonical_text(result.config)
    _write(out / "trace.csv", _trace_csv(result.trace))
    _write(out / "spectrum.csv", _spectrum_csv(result.trace))
    _write(out / "summary.json", _json_text(_summary(result)) + "\n")
    _write(out / "config.expanded", expanded)
    provenance = {
        "package": "zenoauger",
        "version": __version__,
        "config_sha256": hashlib.sha256(expanded.encode()).hexdigest(),
        "deterministic": True,
        "statement": ("no random number generators are used; an identical "
                      "expanded configuration reproduces these files byte "
                      "for byte"),
    }
    _write(out / "provenance.json", _json_text(provenance) + "\n")
    return out


def _config_from_args(args) -> RunConfig:
    if args.config is None and args.preset is None:
        raise ConfigError("provide --config and/or --preset")
    if args.config is not None:
        return load_config(args.config, overrides=args.override,
                           preset=args.preset)
    return preset_config(args.preset, overrides=args.override)


def _axis_value_to_au(axis: str, value: float) -> float:
    if axis == "Omega2":            # given in eV^2
        return value / units.HARTREE_EV**2
    if axis == "intensity":         # given in TW/cm^2
        return units.to_atomic(value, "TWcm2", "intensity")
    if axis in ("t_m", "dt_delay"):  # given in fs
        return units.fs_to_au(value)
    if axis == "omega":             # given in eV
        return units.ev_to_au(value)
    raise ConfigError(f"unknown sweep axis {axis!r}")


def _run_sweep_point(payload):
    cfg, axis, value_au, value_label, point_dir = payload
    try:
        result = execute(apply_axis_value(cfg, axis, value_au))
        emit(result, point_dir)
        fit = result.fit
        return {
            "value": value_label,
            "tau_eff_fs": au_to_fs(fit.tau_eff)
                          if math.isfinite(fit.tau_eff) else math.inf,
            "tau_one_over_e_fs": au_to_fs(fit.tau_one_over_e)
                                 if math.isfinite(fit.tau_one_over_e)
                                 else math.inf,
            "r_squared": fit.r_squared,
            "status": "ok",
        }
    except Exception as exc:  # per-row failure must not kill the sweep
        return {"value": value_label, "tau_eff_fs": math.nan,
                "tau_one_over_e_fs": math.nan, "r_squared": math.nan,
                "status": f"error: {exc}"}


def cmd_run(args) -> int:
    cfg = _config_from_args(args)
    result = execute(cfg)
    out = emit(result, args.out)
    print(f"run complete: {out}")
    for warning in result.warnings:
        print(f"warning: {warning}")
    return EXIT_OK if result.fit.accepted else EXIT_FIT_FLAGGED


def cmd_sweep(args) -> int:
    cfg = _config_from_args(args)
    if args.axis not in SWEEP_AXES:
        raise ConfigError(f"--axis must be one of {SWEEP_AXES}")
    values = [float(v) for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("--values needs comma-separated numbers")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    payloads = [
        (cfg, args.axis, _axis_value_to_au(args.axis, v), v,
         str(out / "points" / f"{i:03d}"))
        for i, v in enumerate(values)
    ]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_run_sweep_point, payloads))
    else:
        rows = [_run_sweep_point(p) for p in payloads]

    lines = [f"{args.axis},tau_eff_envelope_fs,tau_eff_1e_fs,r_squared,status"]
    for row in rows:
        lines.append(",".join((
            format_float(row["value"]),
            format_float(row["tau_eff_fs"]),
            format_float(row["tau_one_over_e_fs"]),
            format_float(row["r_squared"]),
            row["status"].replace(",", ";"),
        )))
    _write(out / "sweep.csv", "\n".join(lines) + "\n")
    print(f"sweep complete: {out / 'sweep.csv'}")
    failed = [r for r in rows if r["status"] != "ok"]
    for row in failed:
        print(f"point {row['value']}: {row['status']}")
    return EXIT_FIT_FLAGGED if failed else EXIT_OK


def cmd_validate(args) -> int:
    cfg = _config_from_args(args)
    from .config import expand
    cfg = expand(cfg)
    levels = LevelScheme(E1=cfg.E1, E2=cfg.E2, eps_c=cfg.eps_c,
                         tau1=cfg.tau1, tau2=cfg.tau2)
    ok = True
    for region, eps_a, tau in (("S", levels.epsA1, cfg.tau1),
                               ("P", levels.epsA2, cfg.tau2)):
        grid = build_grid(region, eps_a, cfg.W, cfg.N, cfg.n_exponent, tau)
        report = validate_resolution(grid, cfg.T_total, tau)
        status = "ok" if report.ok else "FAIL"
        print(f"region {region}: {status}  "
              f"T_rec = {au_to_fs(report.recurrence_time):.2f} fs, "
              f"points/linewidth = {report.points_per_linewidth:.2f}")
        for diag in report.diagnostics:
            print(f"  {diag}")
        ok = ok and report.ok
    return EXIT_OK if ok else EXIT_CONFIG


def cmd_presets(_args) -> int:
    for name in sorted(PRESETS):
        keys = PRESETS[name]
        print(f"{name}: tau1 = {keys['model.tau1']}, "
              f"omega = {keys['drive.omega']}, mode = {keys['drive.mode']}")
    return EXIT_OK


def _add_common(parser):
    parser.add_argument("--config", help="path to a flat key-value config file")
    parser.add_argument("--preset", choices=sorted(PRESETS),
                        help="named scenario to expand")
    parser.add_argument("--override", action="append", default=[],
                        metavar="KEY=VALUE",
                        help="override a config key (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zenoauger",
        description="Simulate measurement-slowed Auger-type decay")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="one simulation, files to --out")
    _add_common(p_run)
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="one run per axis value")
    _add_common(p_sweep)
    p_sweep.add_argument("--out", default="out", help="output directory")
    p_sweep.add_argument("--axis", required=True, choices=SWEEP_AXES,
                         help="swept parameter (Omega2 in eV^2, intensity in "
                              "TW/cm^2, times in fs, omega in eV)")
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated axis values")
    p_sweep.add_argument("--workers", type=int,
                         default=int(os.environ.get(WORKERS_ENV, "1")),
                         help=f"concurrent points (default ${WORKERS_ENV} or 1)")
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate", help="check a config without running")
    _add_common(p_val)
    p_val.set_defaults(func=cmd_validate)

    p_presets = sub.add_parser("presets", help="list named scenarios")
    p_presets.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
