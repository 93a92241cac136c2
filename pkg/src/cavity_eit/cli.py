"""Command-line interface: sweeps to CSV, extrema analysis to JSON.

Commands
--------
eit-sweep    transmission vs two-photon detuning (master equation and/or
             closed-form engine, optionally the three-level restriction)
cavity-scan  transmission vs probe-cavity detuning for an empty cavity or
             one no-control atom
analyze      max/min report (JSON on stdout) for a previously written CSV
converge     transmission vs Fock truncation at a few detunings

All frequencies on disk are linear MHz.  Numbers are serialized with 12
significant digits; adding ``--deterministic`` drops the timestamp comment
so identical runs produce byte-identical files.  Exit status: 0 all points
solved within tolerance, 1 some points flagged, 2 configuration or solver
structure errors (a JSON error record goes to stderr).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from .config import RunConfig
from .errors import (
    CapacityError,
    ConfigError,
    DegenerateSteadyStateError,
    EdgeExtremumError,
)
from .sweep import (
    ENGINE_MASTER_EQUATION,
    ENGINE_SEMICLASSICAL,
    SpectrumRecord,
    SweepSpec,
    VAR_PROBE_CAVITY,
    VAR_TWO_PHOTON,
    convergence_study,
    find_extrema,
    run_sweep,
)

_SPECTRUM_COLUMNS = (
    "T_rel",
    "photon_number",
    "absorption_part",
    "dispersion_part",
    "engine",
    "residual",
)


def _fmt(value) -> str:
    if value is None:
        return ""
    return format(value, ".12g")


def _workers_from_env() -> int | None:
    raw = os.environ.get("EIT_SIM_THREADS")
    if raw is None:
        return None
    try:
        return max(1, int(raw))
    except ValueError as exc:
        raise ConfigError(f"EIT_SIM_THREADS must be an integer, got {raw!r}") from exc


def _load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    return RunConfig.from_file(path)


def _open_out(path: str):
    out = Path(path)
    if out.parent and not out.parent.exists():
        raise ConfigError(f"output directory {out.parent} does not exist")
    return out.open("w", encoding="utf-8", newline="")


def _write_spectrum_csv(path: str, sweep_column: str, records: list[SpectrumRecord],
                        deterministic: bool):
    with _open_out(path) as handle:
        if not deterministic:
            stamp = datetime.now(timezone.utc).isoformat()
            handle.write(f"# generated {stamp}\n")
        writer = csv.writer(handle)
        writer.writerow((sweep_column,) + _SPECTRUM_COLUMNS)
        for rec in records:
            writer.writerow(
                (
                    _fmt(rec.sweep_value),
                    _fmt(rec.transmission_rel),
                    _fmt(rec.photon_number),
                    _fmt(rec.absorption_part),
                    _fmt(rec.dispersion_part),
                    rec.engine,
                    _fmt(rec.residual_norm),
                )
            )


def _read_spectrum_csv(path: str) -> tuple[str, list[SpectrumRecord]]:
    try:
        with open(path, encoding="utf-8", newline="") as handle:
            lines = [ln for ln in handle if not ln.startswith("#")]
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration as exc:
        raise ConfigError(f"{path}: empty CSV") from exc
    if tuple(header[1:]) != _SPECTRUM_COLUMNS:
        raise ConfigError(f"{path}: unrecognized spectrum columns {header!r}")
    records = []
    for row in reader:
        records.append(
            SpectrumRecord(
                sweep_value=float(row[0]),
                transmission_rel=float(row[1]),
                photon_number=float(row[2]),
                absorption_part=float(row[3]) if row[3] else None,
                dispersion_part=float(row[4]) if row[4] else None,
                residual_norm=float(row[6]) if row[6] else None,
                engine=row[5],
            )
        )
    return header[0], records


def _exit_status(records: list[SpectrumRecord]) -> int:
    return 0 if all(r.converged for r in records) else 1


def _cmd_eit_sweep(args) -> int:
    config = _load_config(args.config)
    if args.atoms is not None:
        config = dataclasses.replace(config, n_atoms=args.atoms)
    engines = {
        "me": (ENGINE_MASTER_EQUATION,),
        "sc": (ENGINE_SEMICLASSICAL,),
        "both": (ENGINE_MASTER_EQUATION, ENGINE_SEMICLASSICAL),
    }[args.engine]
    spec = SweepSpec(
        variable=VAR_TWO_PHOTON,
        start=config.start,
        stop=config.stop,
        n_points=config.n_points,
        base_params=config.params(),
        engines=engines,
        level_scheme="three" if args.three_level else "five",
    )
    records = run_sweep(spec, max_workers=_workers_from_env())
    _write_spectrum_csv(args.out, "delta_MHz", records, args.deterministic)
    return _exit_status(records)


def _cmd_cavity_scan(args) -> int:
    config = _load_config(args.config)
    config = dataclasses.replace(config, n_atoms=args.atoms)
    spec = SweepSpec(
        variable=VAR_PROBE_CAVITY,
        start=args.start,
        stop=args.stop,
        n_points=args.points,
        base_params=config.params(),
        engines=(ENGINE_MASTER_EQUATION,),
        level_scheme="two" if args.atoms == 1 else "five",
    )
    records = run_sweep(spec, max_workers=_workers_from_env())
    _write_spectrum_csv(args.out, "delta_p_cav_MHz", records, args.deterministic)
    return _exit_status(records)


def _cmd_analyze(args) -> int:
    sweep_column, records = _read_spectrum_csv(args.input)
    report = {"input": args.input, "sweep_column": sweep_column, "engines": {}}
    for engine in sorted({r.engine for r in records}):
        subset = [r for r in records if r.engine == engine]
        extrema = find_extrema(subset)
        report["engines"][engine] = {
            "delta_max_MHz": extrema.delta_max,
            "T_max": extrema.t_max,
            "delta_min_MHz": extrema.delta_min,
            "T_min": extrema.t_min,
            "separation_MHz": extrema.delta_min - extrema.delta_max,
        }
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def _cmd_converge(args) -> int:
    config = _load_config(args.config)
    try:
        n_max_list = [int(part) for part in args.nmax_list.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --nmax-list {args.nmax_list!r}") from exc
    study = convergence_study(config.params(), n_max_list)
    with _open_out(args.out) as handle:
        if not args.deterministic:
            stamp = datetime.now(timezone.utc).isoformat()
            handle.write(f"# generated {stamp}\n")
        writer = csv.writer(handle)
        writer.writerow(("n_max", "delta_MHz", "T_rel", "photon_number"))
        for row in study.rows:
            writer.writerow(
                (row.n_max, _fmt(row.delta_mhz), _fmt(row.transmission_rel), _fmt(row.photon_number))
            )
    if not study.converged:
        changes = {str(k): v for k, v in study.last_changes.items()}
        print(
            json.dumps({"warning": "truncation not converged", "last_changes": changes}),
            file=sys.stderr,
        )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavity-eit",
        description="Steady-state cavity transmission spectra for multilevel atoms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("eit-sweep", help="transmission vs two-photon detuning")
    sweep.add_argument("--config", help="flat key = value config file (defaults built in)")
    sweep.add_argument("--atoms", type=int, choices=(0, 1, 2), help="override atom number")
    sweep.add_argument("--engine", choices=("me", "sc", "both"), default="me")
    sweep.add_argument("--three-level", action="store_true",
                       help="restrict the master equation to {g1, g2, e}")
    sweep.add_argument("--out", required=True, help="output CSV path")
    sweep.add_argument("--deterministic", action="store_true",
                       help="omit the timestamp header line")
    sweep.set_defaults(func=_cmd_eit_sweep)

    scan = sub.add_parser("cavity-scan", help="transmission vs probe-cavity detuning")
    scan.add_argument("--config", help="flat key = value config file")
    scan.add_argument("--atoms", type=int, choices=(0, 1), default=1,
                      help="0: empty cavity, 1: one no-control atom")
    scan.add_argument("--start", type=float, default=-3.0, help="window start, MHz")
    scan.add_argument("--stop", type=float, default=3.0, help="window stop, MHz")
    scan.add_argument("--points", type=int, default=241, help="grid points")
    scan.add_argument("--out", required=True, help="output CSV path")
    scan.add_argument("--deterministic", action="store_true")
    scan.set_defaults(func=_cmd_cavity_scan)

    analyze = sub.add_parser("analyze", help="extrema report for a spectrum CSV")
    analyze.add_argument("--in", dest="input", required=True, help="input CSV path")
    analyze.set_defaults(func=_cmd_analyze)

    converge = sub.add_parser("converge", help="Fock-truncation convergence table")
    converge.add_argument("--config", help="flat key = value config file")
    converge.add_argument("--nmax-list", required=True,
                          help="comma separated ascending truncations, e.g. 2,3,4")
    converge.add_argument("--out", required=True, help="output CSV path")
    converge.add_argument("--deterministic", action="store_true")
    converge.set_defaults(func=_cmd_converge)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CapacityError, DegenerateSteadyStateError, EdgeExtremumError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        return 2
