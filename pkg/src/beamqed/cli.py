"""Command-line front end: simulate, sweep, fit, params, validate.

Exit codes: 0 success, 2 configuration error, 3 numerical divergence,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import physics
from .analysis import build_report, extract_observables
from .config import ConfigError, RunConfig, parse_config
from .engine import DivergenceError, StepSizeError, run_experiment
from .model import NUMERIC_FIELDS

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_IO = 4

_CSV_HEADER = ["t", "P_gn", "P_em", "D", "S"]
_SUMMARY_HEADER = ["value", "oscillation_count", "descending_rate", "ascending_rate", "sum_decay_rate"]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


@dataclass(frozen=True)
class SweepSpec:
    """One numeric model parameter swept over explicit values."""

    parameter_name: str
    values: tuple
    parallelism: int = 1

    def __post_init__(self):
        if self.parameter_name not in NUMERIC_FIELDS:
            raise ValueError(
                f"parameter_name must be a numeric model field {NUMERIC_FIELDS}, "
                f"got {self.parameter_name!r}"
            )
        if not self.values:
            raise ValueError("values must be non-empty")
        if not all(np.isfinite(v) for v in self.values):
            raise ValueError("values must all be finite")
        if self.parallelism < 1:
            raise ValueError(f"parallelism must be >= 1, got {self.parallelism!r}")


def _write_outputs(cfg: RunConfig, trajectory):
    obs = extract_observables(trajectory)
    csv_path = Path(cfg.csv_path)
    report_path = Path(cfg.report_path)
    for path in (csv_path, report_path):
        path.parent.mkdir(parents=True, exist_ok=True)

    header = list(_CSV_HEADER)
    if cfg.record_full_state:
        for i in range(4):
            for j in range(4):
                header += [f"re_{i}{j}", f"im_{i}{j}"]
    with open(csv_path, "w", newline="") as handle:
        handle.write(",".join(header) + "\n")
        for k, t in enumerate(trajectory.times):
            row = [t, obs.p_gn[k], obs.p_em[k], obs.difference[k], obs.total[k]]
            if cfg.record_full_state:
                for i in range(4):
                    for j in range(4):
                        entry = trajectory.states[k, i, j]
                        row += [entry.real, entry.imag]
            handle.write(",".join(_fmt(float(x)) for x in row) + "\n")

    report = build_report(trajectory.times, obs.difference, obs.total, cfg.hysteresis)
    with open(report_path, "w") as handle:
        json.dump(report.to_dict(), handle, indent=2, sort_keys=True)
        handle.write("\n")
    return report


def _cmd_simulate(args) -> int:
    cfg = parse_config(Path(args.config).read_text())
    trajectory = run_experiment(cfg.model, cfg.initial_state, cfg.integrator)
    _write_outputs(cfg, trajectory)
    print(f"wrote {cfg.csv_path} ({len(trajectory)} rows) and {cfg.report_path}")
    return EXIT_OK


def _sweep_point(payload):
    """Run one sweep value; executed in a worker process."""
    config_text, parameter_name, value, out_dir = payload
    try:
        cfg = parse_config(config_text)
        cfg = dataclasses.replace(
            cfg,
            model=dataclasses.replace(cfg.model, **{parameter_name: value}),
            csv_path=str(Path(out_dir) / f"value_{_fmt(value)}" / "trajectory.csv"),
            report_path=str(Path(out_dir) / f"value_{_fmt(value)}" / "report.json"),
        )
        trajectory = run_experiment(cfg.model, cfg.initial_state, cfg.integrator)
        report = _write_outputs(cfg, trajectory)
    except (ConfigError, StepSizeError, ValueError) as exc:
        return {"value": value, "error": str(exc), "exit": EXIT_CONFIG}
    except DivergenceError as exc:
        return {"value": value, "error": str(exc), "exit": EXIT_DIVERGED}
    except OSError as exc:
        return {"value": value, "error": str(exc), "exit": EXIT_IO}
    return {
        "value": value,
        "oscillation_count": report.oscillation_count,
        "descending_rate": report.descending_rate,
        "ascending_rate": report.ascending_rate,
        "sum_decay_rate": report.sum_decay_rate,
    }


def _cmd_sweep(args) -> int:
    config_text = Path(args.config).read_text()
    parse_config(config_text)  # fail early on a bad base config
    try:
        spec = SweepSpec(
            parameter_name=args.param,
            values=tuple(args.values),
            parallelism=args.parallelism,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payloads = [(config_text, spec.parameter_name, v, str(out_dir)) for v in spec.values]

    if spec.parallelism == 1 or len(payloads) == 1:
        results = [_sweep_point(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=spec.parallelism) as pool:
            results = list(pool.map(_sweep_point, payloads))

    results.sort(key=lambda row: row["value"])
    with open(out_dir / "summary.csv", "w", newline="") as handle:
        handle.write(",".join(_SUMMARY_HEADER) + "\n")
        for row in results:
            if "error" in row:
                cells = [_fmt(row["value"])] + ["FAILED"] * 4
            else:
                cells = [
                    _fmt(row["value"]),
                    str(row["oscillation_count"]),
                    _fmt(row["descending_rate"]),
                    _fmt(row["ascending_rate"]),
                    _fmt(row["sum_decay_rate"]),
                ]
            handle.write(",".join(cells) + "\n")

    failures = [row for row in results if "error" in row]
    for row in failures:
        print(f"value {_fmt(row['value'])} failed: {row['error']}", file=sys.stderr)
    print(f"wrote {out_dir / 'summary.csv'} ({len(results)} rows, {len(failures)} failed)")
    if failures:
        return max(row["exit"] for row in failures)
    return EXIT_OK


def _read_series_csv(path):
    with open(path) as handle:
        header = handle.readline().strip().split(",")
        for name in _CSV_HEADER:
            if name not in header:
                raise ConfigError(f"{path}: missing column {name!r}")
        idx = {name: header.index(name) for name in _CSV_HEADER}
        times, diff, total = [], [], []
        for line in handle:
            cells = line.strip().split(",")
            times.append(float(cells[idx["t"]]))
            diff.append(float(cells[idx["D"]]))
            total.append(float(cells[idx["S"]]))
    return np.asarray(times), np.asarray(diff), np.asarray(total)


def _cmd_fit(args) -> int:
    times, diff, total = _read_series_csv(args.csv)
    if times.size < 2:
        raise ConfigError(f"{args.csv}: need at least two rows")
    report = build_report(times, diff, total, args.hysteresis)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as handle:
        json.dump(report.to_dict(), handle, indent=2, sort_keys=True)
        handle.write("\n")
    print(f"wrote {out}")
    return EXIT_OK


def _print_assumptions(report) -> None:
    for check in report.checks:
        ratio = "n/a" if check.ratio is None else f"{check.ratio:.6g}"
        print(f"{check.name}: {ratio} [{check.status}]")
    print(f"threshold {report.threshold:g}: {'all ok' if report.all_ok else 'NOT satisfied'}")


def _cmd_params(args) -> int:
    sub = args.params_command
    if sub == "cavity":
        geometry = physics.CavityGeometry(
            l1=args.l[0], l2=args.l[1], l3=args.l[2],
            epsilon_r=args.epsilon_r, mu_r=args.mu_r, mode=tuple(args.mode),
        )
        print(f"resonance frequency = {physics.cavity_resonance_frequency(geometry):.6e} Hz")
    elif sub == "field":
        field = physics.beam_field_at_distance(args.current, args.distance)
        print(f"B = {field:.6e} T")
    elif sub == "distance":
        distance = physics.distance_for_target_field(args.current, args.field)
        print(f"h = {distance:.6e} m")
    elif sub == "kinematics":
        kin = physics.beam_kinematics(args.ke)
        print(f"gamma = {kin.gamma_factor:.9g}")
        print(f"speed = {kin.speed:.6e} m/s")
    elif sub == "validate":
        beam = physics.BeamParameters(
            beam_radius=args.beam_radius,
            distance=args.distance,
            modulation_wavelength=args.wavelength,
            packet_length=args.packet_length,
        )
        _print_assumptions(physics.validate_assumptions(beam, args.system_size, args.threshold))
    else:  # pragma: no cover - argparse enforces choices
        raise ConfigError(f"unknown params subcommand {sub!r}")
    return EXIT_OK


def _add_validate_arguments(parser):
    parser.add_argument("--packet-length", type=float, required=True, help="wave packet length, m")
    parser.add_argument("--wavelength", type=float, required=True, help="modulation wavelength, m")
    parser.add_argument("--beam-radius", type=float, required=True, help="beam radius a, m")
    parser.add_argument("--distance", type=float, required=True, help="beam-to-system distance h, m")
    parser.add_argument("--system-size", type=float, required=True, help="quantum system size, m")
    parser.add_argument("--threshold", type=float, default=0.1, help="smallness threshold (default 0.1)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamqed",
        description="Simulate a spin qubit in a resonator driven by a modulated electron beam.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="run one experiment from a config file")
    simulate.add_argument("--config", required=True, help="key = value config file")
    simulate.set_defaults(func=_cmd_simulate)

    sweep = commands.add_parser("sweep", help="run one simulation per parameter value")
    sweep.add_argument("--config", required=True, help="base config file")
    sweep.add_argument("--param", required=True, help="numeric model field to sweep")
    sweep.add_argument("--values", required=True, type=float, nargs="+", help="values to sweep over")
    sweep.add_argument("--parallelism", type=int, default=1, help="worker processes (default 1)")
    sweep.add_argument("--out-dir", required=True, help="directory for summary.csv and per-value runs")
    sweep.set_defaults(func=_cmd_sweep)

    fit = commands.add_parser("fit", help="run the coherence analysis on an existing trajectory CSV")
    fit.add_argument("--csv", required=True, help="trajectory CSV with t,P_gn,P_em,D,S columns")
    fit.add_argument("--out", required=True, help="report JSON path")
    fit.add_argument("--hysteresis", type=float, default=0.0, help="crossing dead band (default 0)")
    fit.set_defaults(func=_cmd_fit)

    params = commands.add_parser("params", help="closed-form beam/cavity calculators")
    params_sub = params.add_subparsers(dest="params_command", required=True)

    cavity = params_sub.add_parser("cavity", help="rectangular cavity resonance frequency")
    cavity.add_argument("--l", type=float, nargs=3, required=True, metavar=("L1", "L2", "L3"))
    cavity.add_argument("--mode", type=int, nargs=3, default=(1, 1, 0), metavar=("M", "N", "Q"))
    cavity.add_argument("--epsilon-r", type=float, default=1.0)
    cavity.add_argument("--mu-r", type=float, default=1.0)

    field_cmd = params_sub.add_parser("field", help="beam magnetic field at a distance")
    field_cmd.add_argument("--current", type=float, required=True, help="beam current, A")
    field_cmd.add_argument("--distance", type=float, required=True, help="distance, m")

    distance_cmd = params_sub.add_parser("distance", help="distance for a target field")
    distance_cmd.add_argument("--current", type=float, required=True, help="beam current, A")
    distance_cmd.add_argument("--field", type=float, required=True, help="target field, T")

    kinematics = params_sub.add_parser("kinematics", help="relativistic electron kinematics")
    kinematics.add_argument("--ke", type=float, required=True, help="kinetic energy, eV")

    validate_sub = params_sub.add_parser("validate", help="near-field assumption checker")
    _add_validate_arguments(validate_sub)
    params.set_defaults(func=_cmd_params)

    validate = commands.add_parser("validate", help="near-field assumption checker")
    _add_validate_arguments(validate)
    validate.set_defaults(func=_cmd_params, params_command="validate")

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, StepSizeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
