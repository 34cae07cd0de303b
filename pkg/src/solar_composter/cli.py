"""Command-line interface.

Exit status: 0 on success (flags in a report are findings, not failures),
1 when a computation fails, 2 for usage or configuration errors.
"""

import argparse
import logging
import math
import re
import sys

from .config import parse_config
from .errors import ComposterError, ConfigError
from .output import atomic_write_text, curve_csv, dump_json, trace_csv
from .pv_model import PvModule, mpp
from .report import build_report
from .system_sim import (
    DAY_S,
    SCENARIOS,
    session_rise_time,
    simulate,
    verdict_from_trace,
)

log = logging.getLogger("solar_composter")

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE = 0, 1, 2
DEFAULT_CONFIG = "preset:paper"

_UNITS = {"s": 1.0, "m": 60.0, "min": 60.0, "h": 3600.0, "d": DAY_S}
_DURATION = re.compile(r"^\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*(s|min|m|h|d)?\s*$")


class UsageError(Exception):
    pass


def parse_duration(text):
    """``"600"``, ``"600s"``, ``"10min"``, ``"2.5h"`` or ``"3d"`` to seconds."""
    m = _DURATION.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"invalid duration {text!r}")
    return float(m.group(1)) * _UNITS[m.group(2) or "s"]


def cmd_size(args, config):
    report = build_report(config, paper_faithful=args.paper_faithful or None)
    text = dump_json(report.to_dict())
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    for flag in report.flags:
        log.info("flag %s: %s", flag.code, flag.message)
    return EXIT_OK


def cmd_pv_curve(args, config):
    if args.points < 2:
        raise UsageError("--points must be >= 2")
    if args.irradiance <= 0:
        raise UsageError("--irradiance must be > 0")
    module = PvModule(config.pv_datasheet, config.pv_ideality)
    curve = module.sweep(args.irradiance, args.temperature, args.points)
    point = mpp(module.params, module.sheet, args.irradiance, args.temperature)
    text = curve_csv(curve)
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    summary = (f"mpp irradiance_wm2={args.irradiance!r} temperature_c="
               f"{args.temperature!r} voltage_V={point.voltage:.4f} "
               f"current_A={point.current:.4f} power_W={point.power:.4f}")
    print(summary, file=sys.stdout if args.out else sys.stderr)
    return EXIT_OK


def simulation_summary(trace, config, scenario, horizon):
    summary = {
        "scenario": scenario,
        "power_mode": config.power_mode.value,
        "horizon_s": horizon,
        "dt_s": trace.dt,
        "start_s": trace.start,
        "records": len(trace),
        "initial_soc": trace.initial_soc,
        "final_soc": float(trace.soc[-1]),
        "min_soc": trace.min_soc,
        "max_soc": trace.max_soc,
        "soc_floor": trace.soc_floor,
        "pv_energy_wh": trace.pv_energy_wh,
        "load_energy_wh": trace.load_energy_wh,
        "losses_wh": trace.losses_wh,
        "final_motor_rpm": float(trace.motor_rpm[-1]),
        "final_drum_rpm": float(trace.drum_rpm[-1]),
        "max_motor_rpm": float(trace.motor_rpm.max()),
        "max_drum_rpm": float(trace.drum_rpm.max()),
        "rise_time_99_s": session_rise_time(trace, config),
    }
    if scenario == "blackout":
        verdict = verdict_from_trace(trace, int(math.ceil(horizon / DAY_S)))
        summary["autonomy"] = {"verdict": "pass" if verdict.passed else "fail",
                               "days": verdict.days, "min_soc": verdict.min_soc}
    return summary


def cmd_simulate(args, config):
    if not args.dt > 0:
        raise UsageError("--dt must be > 0")
    horizon = args.horizon
    if horizon is None:
        days = config.battery.autonomy_days if args.scenario == "blackout" else 1
        horizon = days * DAY_S
    if horizon < args.dt:
        raise UsageError("--horizon must be >= --dt")
    trace = simulate(config, horizon, args.dt, args.scenario, start=args.start)
    summary = simulation_summary(trace, config, args.scenario, horizon)
    text = dump_json(summary)
    if args.out:
        atomic_write_text(args.out, trace_csv(trace))
        summary_path = args.summary or f"{args.out}.summary.json"
        atomic_write_text(summary_path, text)
    sys.stdout.write(text)
    return EXIT_OK


def _float_arg(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"number must be finite, got {text!r}")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="solar-composter",
        description="Size and simulate a solar-powered rotary drum composter.")
    parser.add_argument("--paper-faithful", action="store_true",
                        help="evaluate source equations verbatim and flag "
                             "non-physical results")
    parser.add_argument("-v", "--verbose", action="store_true")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=DEFAULT_CONFIG,
                        help="JSON config path or preset:<name> "
                             f"(default {DEFAULT_CONFIG})")
    common.add_argument("--out", help="output path (default: standard output)")
    common.add_argument("--paper-faithful", action="store_true",
                        default=argparse.SUPPRESS)

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("size", parents=[common], help="write the JSON design report")
    p.set_defaults(func=cmd_size)

    p = sub.add_parser("pv-curve", parents=[common], help="write an I-V curve as CSV")
    p.add_argument("--irradiance", type=_float_arg, default=1000.0, help="W/m2")
    p.add_argument("--temperature", type=_float_arg, default=25.0, help="degC")
    p.add_argument("--points", type=int, default=200)
    p.set_defaults(func=cmd_pv_curve)

    p = sub.add_parser("simulate", parents=[common],
                       help="run the time-stepped system simulation")
    p.add_argument("--horizon", type=parse_duration, default=None,
                   help="duration, e.g. 86400, 12h, 3d (default 1 day, or the "
                        "battery autonomy for blackout)")
    p.add_argument("--dt", type=_float_arg, default=1.0, help="step in seconds")
    p.add_argument("--scenario", choices=SCENARIOS, default="clear-days")
    p.add_argument("--start", type=parse_duration, default=0.0,
                   help="clock time at t=0, e.g. 9.5h")
    p.add_argument("--summary", help="summary JSON path "
                                     "(default <out>.summary.json)")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        config = parse_config(args.config)
        return args.func(args, config)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ComposterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
