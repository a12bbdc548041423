"""Command-line interface tying simulation, optimization, patterns and metrics together.

Subcommands: ``pattern``, ``simulate``, ``optimize``, ``metrics``, ``ingest``.
All file outputs are deterministic for fixed inputs and ``--seed``, and are
written atomically into ``--out-dir``.

Exit codes: 0 ok, 2 usage, 3 validation, 4 numeric failure.  Failures print a
single machine-parsable ``error:<CODE>: <message>`` line to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys

import numpy as np

from .channel import Scenario, synthesize
from .geometry import SphericalCoord, spherical_to_cartesian
from .metrics import (
    eirp_to_tx_power,
    metrics_report,
    total_eirp_dbm,
    write_report,
)
from .pso import SwarmConfig, optimize
from .ris import (
    FocusTarget,
    RisPanel,
    beam_pattern,
    config_from_text,
    config_to_text,
    phase_profile_for_focus,
)
from .scenario import SchemaError, build_scenario, build_swarm_config, read_scenario_document
from .sweeps import DeembedError, SweepFormatError, export_sweep, ingest_sweep
from .util import atomic_write_text, float_repr

_FAR_FOCUS_M = 1e6  # focal radius used to realize far-field steering targets


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error:USAGE: {message}", file=sys.stderr)
        raise SystemExit(2)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="rismimo",
        description="RIS-assisted MIMO link simulator and analysis toolkit",
    )
    parser.add_argument("--scenario", help="scenario (.scn) file")
    parser.add_argument("--seed", type=int, help="override scatter and swarm seeds")
    parser.add_argument("--out-dir", default=".", help="directory for output files")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pattern", help="far-field tile pattern CSV for steered profiles")
    p.add_argument("--incidence", type=float, default=120.0, help="incidence angle, degrees")
    p.add_argument("--steer", type=float, nargs="+", default=[45, 60, 75, 90, 105, 120, 135])
    p.add_argument("--rows", type=int, default=16)
    p.add_argument("--cols", type=int, default=16)
    p.add_argument("--pitch-m", type=float, default=0.03)
    p.add_argument("--freq-hz", type=float, default=3.5e9)
    p.add_argument("--grid-step-deg", type=float, default=0.25)
    p.add_argument("--polarization", default="v", choices=("v", "h"))

    p = sub.add_parser("simulate", help="synthesize a sweep and its metrics report")
    group = p.add_mutually_exclusive_group()
    group.add_argument(
        "--focus",
        type=float,
        nargs=3,
        metavar=("R_M", "THETA_DEG", "PHI_DEG"),
        help="steer the panel at this receiver location (panel frame)",
    )
    group.add_argument("--ris-config", help="0/1 text-grid configuration file")
    p.add_argument("--flip", action="store_true", help="invert all bits of the focus profile")
    p.add_argument("--power-grid-dbm", type=float, nargs=3, default=[0.0, 40.0, 2.0],
                   metavar=("LO", "HI", "STEP"))

    p = sub.add_parser("optimize", help="run the beam search on a scenario")

    p = sub.add_parser("metrics", help="report metrics from a sweep and/or EIRP budget")
    p.add_argument("--sweep", help="sweep CSV file")
    p.add_argument("--tx-power-dbm", type=float, help="operating point for the report")
    p.add_argument("--noise-psd", type=float, default=-169.0, help="noise PSD, dBm/Hz")
    p.add_argument("--eirp-per-5mhz", type=float, help="regulatory EIRP limit, dBm per 5 MHz")
    p.add_argument("--antenna-gain-dbi", type=float, default=0.0)
    p.add_argument("--bandwidth-mhz", type=float, help="bandwidth for the EIRP conversion")
    p.add_argument("--power-grid-dbm", type=float, nargs=3, default=[0.0, 40.0, 2.0],
                   metavar=("LO", "HI", "STEP"))

    p = sub.add_parser("ingest", help="de-embed and normalize a raw sweep")
    p.add_argument("--raw", required=True, help="raw sweep CSV")
    p.add_argument("--reference", help="scalar reference trace CSV")
    return parser


def _load_scene(args) -> tuple[Scenario, SwarmConfig]:
    if not args.scenario:
        raise UsageError("this command requires --scenario")
    doc = read_scenario_document(args.scenario)
    scn = build_scenario(doc)
    swarm = build_swarm_config(doc)
    if args.seed is not None:
        scn = dataclasses.replace(
            scn, scatter=dataclasses.replace(scn.scatter, seed=args.seed)
        )
        swarm = dataclasses.replace(swarm, seed=args.seed)
    return scn, swarm


def _out_path(args, name: str) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


def _cmd_pattern(args) -> int:
    if args.scenario:
        scn, _ = _load_scene(args)
        panel = scn.ris
    else:
        panel = RisPanel(rows=args.rows, cols=args.cols, pitch_m=args.pitch_m)
    grid = np.arange(0.0, 180.0 + args.grid_step_deg / 2, args.grid_step_deg)
    tx = spherical_to_cartesian(
        SphericalCoord(_FAR_FOCUS_M, math.pi / 2, math.radians(args.incidence)), panel.pose
    )
    columns = []
    for steer in args.steer:
        target = FocusTarget(
            tx_position=tx,
            rx_coord=SphericalCoord(_FAR_FOCUS_M, math.pi / 2, math.radians(steer)),
            frequency_hz=args.freq_hz,
        )
        config = phase_profile_for_focus(panel, target)
        columns.append(
            beam_pattern(panel, config, args.incidence, grid, args.freq_hz, args.polarization)
        )
    header = "angle_deg," + ",".join(f"gain_db_steer_{s:g}" for s in args.steer)
    lines = [header]
    for i, ang in enumerate(grid):
        lines.append(
            ",".join([float_repr(ang)] + [float_repr(col[i]) for col in columns])
        )
    path = _out_path(args, "pattern.csv")
    atomic_write_text(path, "\n".join(lines) + "\n")
    for steer, col in zip(args.steer, columns):
        print(f"steer {steer:g} deg: peak at {grid[int(np.argmax(col))]:g} deg")
    print(f"wrote {path}")
    return 0


def _power_grid(spec) -> np.ndarray:
    lo, hi, step = spec
    if step <= 0 or hi <= lo:
        raise UsageError("power grid needs lo < hi and a positive step")
    return np.arange(lo, hi + step / 2, step)


def _cmd_simulate(args) -> int:
    scn, _ = _load_scene(args)
    config = None
    if args.focus is not None:
        r, theta_deg, phi_deg = args.focus
        target = FocusTarget(
            tx_position=scn.tx_array.pose.origin,
            rx_coord=SphericalCoord(r, math.radians(theta_deg), math.radians(phi_deg)),
            frequency_hz=scn.band.center_hz,
            flip=args.flip,
        )
        config = phase_profile_for_focus(scn.ris, target)
    elif args.ris_config:
        with open(args.ris_config) as fh:
            config = config_from_text(fh.read())
    sweep = synthesize(scn, config)
    sweep_path = _out_path(args, "sweep.csv")
    export_sweep(sweep, sweep_path)
    report = metrics_report(
        sweep,
        label=scn.band.label or "simulated",
        tx_powers_dbm=_power_grid(args.power_grid_dbm),
        noise_psd_dbm_hz=scn.noise_psd_dbm_hz,
    )
    paths = write_report(report, args.out_dir)
    print(f"band gain: {10 * math.log10(report.band_gain):.3f} dB, "
          f"mean effective rank: {report.mean_erank:.4f}")
    for path in [sweep_path] + paths:
        print(f"wrote {path}")
    return 0


def _cmd_optimize(args) -> int:
    scn, swarm = _load_scene(args)
    result = optimize(scn, swarm)
    coord = result.best_params.rx_coord
    lines = [
        f"r_m: {float_repr(coord.r)}",
        f"theta_deg: {float_repr(math.degrees(coord.theta))}",
        f"phi_deg: {float_repr(math.degrees(coord.phi))}",
        f"flip: {'true' if result.best_params.flip else 'false'}",
        f"band_gain_linear: {float_repr(result.best_gain)}",
        f"band_gain_db: {float_repr(10 * math.log10(result.best_gain))}",
        f"evaluations: {result.evaluations}",
        f"iterations: {len(result.fitness_trace) - 1}",
        "",
        config_to_text(result.best_config),
    ]
    result_path = _out_path(args, "result.txt")
    atomic_write_text(result_path, "\n".join(lines))
    config_path = _out_path(args, "ris_config.txt")
    atomic_write_text(config_path, config_to_text(result.best_config))
    trace_lines = ["iteration,gbest_gain_db,evaluations"]
    swarm_evals = swarm.swarm_size
    for i, gain in enumerate(result.fitness_trace):
        trace_lines.append(
            f"{i},{float_repr(10 * math.log10(gain))},{swarm_evals * (i + 1)}"
        )
    trace_path = _out_path(args, "trace.csv")
    atomic_write_text(trace_path, "\n".join(trace_lines) + "\n")
    print(f"best band gain: {10 * math.log10(result.best_gain):.3f} dB "
          f"after {result.evaluations} evaluations")
    for path in (result_path, config_path, trace_path):
        print(f"wrote {path}")
    return 0


def _cmd_metrics(args) -> int:
    lines = []
    bandwidth_hz = None
    if args.bandwidth_mhz is not None:
        if args.bandwidth_mhz <= 0:
            raise UsageError("--bandwidth-mhz must be positive")
        bandwidth_hz = args.bandwidth_mhz * 1e6

    sweep = None
    if args.sweep:
        sweep = ingest_sweep(args.sweep)
        span = float(sweep.frequencies[-1] - sweep.frequencies[0])
        if bandwidth_hz is None:
            bandwidth_hz = span

    tx_power_dbm = args.tx_power_dbm
    if args.eirp_per_5mhz is not None:
        if bandwidth_hz is None:
            raise UsageError("EIRP conversion needs --bandwidth-mhz or a sweep")
        tx_power_dbm = eirp_to_tx_power(args.eirp_per_5mhz, bandwidth_hz, args.antenna_gain_dbi)
        lines.append(f"eirp_total_dbm: {float_repr(total_eirp_dbm(args.eirp_per_5mhz, bandwidth_hz))}")
    if tx_power_dbm is not None:
        lines.append(f"tx_power_dbm: {float_repr(tx_power_dbm)}")
    if bandwidth_hz is not None:
        lines.append(f"bandwidth_hz: {float_repr(bandwidth_hz)}")

    if sweep is not None:
        report = metrics_report(
            sweep,
            label=os.path.basename(args.sweep),
            tx_powers_dbm=_power_grid(args.power_grid_dbm),
            noise_psd_dbm_hz=args.noise_psd,
        )
        paths = write_report(report, args.out_dir)
        lines.append(f"band_gain_db: {float_repr(10 * math.log10(report.band_gain))}")
        lines.append(f"mean_effective_rank: {float_repr(report.mean_erank)}")
        for path in paths:
            print(f"wrote {path}")
    if not lines:
        raise UsageError("nothing to report: provide --sweep and/or EIRP flags")
    summary_path = _out_path(args, "metrics_summary.txt")
    atomic_write_text(summary_path, "\n".join(lines) + "\n")
    for line in lines:
        print(line)
    print(f"wrote {summary_path}")
    return 0


def _cmd_ingest(args) -> int:
    sweep = ingest_sweep(args.raw, reference=args.reference)
    path = _out_path(args, "calibrated.csv")
    export_sweep(sweep, path)
    print(f"wrote {path}")
    return 0


_COMMANDS = {
    "pattern": _cmd_pattern,
    "simulate": _cmd_simulate,
    "optimize": _cmd_optimize,
    "metrics": _cmd_metrics,
    "ingest": _cmd_ingest,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error:USAGE: {exc}", file=sys.stderr)
        return 2
    except (DeembedError, ZeroDivisionError, FloatingPointError) as exc:
        print(f"error:NUMERIC: {exc}", file=sys.stderr)
        return 4
    except (SchemaError, SweepFormatError, ValueError, OSError) as exc:
        print(f"error:VALIDATION: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
