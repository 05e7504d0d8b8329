"""Command-line front end.

Subcommands: run (single scenario), sweep-flows / sweep-beta /
sweep-sigma (the three Monte Carlo experiments), validate (scenario
check), oracle (exact optimum on tiny instances). Every default matches
the standard 60 GHz parameter table; units are converted once at
ingestion (Gbps, microseconds, MHz, dBm/MHz, degrees). Progress goes to
stderr so stdout stays machine-parseable.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from . import engine, oracle
from .errors import BudgetError, ConfigurationError
from .phy import RadioConstants, dbm_per_mhz_to_w_per_hz, friis_constant, SPEED_OF_LIGHT_M_S
from .scenario import (
    FrameTiming,
    GenParams,
    generate,
    load_scenario,
    save_scenario,
    validate,
)
from .schedulers import SCHEDULERS

OUTDIR_ENV = "FDBACKHAUL_OUTDIR"
DEFAULT_SCHEDULERS = ",".join(SCHEDULERS)


def _add_radio_args(p: argparse.ArgumentParser, default_slots: int = 2000) -> None:
    g = p.add_argument_group("radio and frame parameters")
    g.add_argument("--tx-power-w", type=float, default=1.0, help="transmit power [W]")
    g.add_argument("--pathloss-exp", type=float, default=2.0, help="path loss exponent")
    g.add_argument("--mui-factor", type=float, default=1.0, help="MUI factor rho")
    g.add_argument("--efficiency", type=float, default=0.5, help="transceiver efficiency eta")
    g.add_argument("--bandwidth-mhz", type=float, default=1200.0, help="system bandwidth [MHz]")
    g.add_argument("--noise-dbm-mhz", type=float, default=-134.0, help="noise PSD [dBm/MHz]")
    g.add_argument("--beamwidth-deg", type=float, default=30.0, help="half-power beamwidth [deg]")
    g.add_argument("--carrier-ghz", type=float, default=60.0, help="carrier frequency [GHz]")
    g.add_argument("--slot-us", type=float, default=18.0, help="slot duration [us]")
    g.add_argument("--sched-phase-us", type=float, default=850.0, help="scheduling phase [us]")
    g.add_argument("--slots", type=int, default=default_slots,
                   help="transmission slots per frame M")


def _add_gen_args(p: argparse.ArgumentParser, default_flows: int) -> None:
    g = p.add_argument_group("scenario generation")
    g.add_argument("--bs", type=int, default=10, help="number of base stations")
    g.add_argument("--area-m", type=float, default=100.0, help="deployment square side [m]")
    g.add_argument("--flows", type=int, default=default_flows, help="number of flows")
    g.add_argument("--qos-low-gbps", type=float, default=1.0, help="QoS lower bound [Gbps]")
    g.add_argument("--qos-high-gbps", type=float, default=3.0, help="QoS upper bound [Gbps]")
    g.add_argument("--beta-low", type=float, default=2.0, help="SI cancelation beta lower bound")
    g.add_argument("--beta-high", type=float, default=4.0, help="SI cancelation beta upper bound")
    g.add_argument("--sigma", type=float, default=1e-3, help="contention threshold sigma")


def _add_common_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=1, help="master seed")
    p.add_argument(
        "--schedulers", default=DEFAULT_SCHEDULERS, help="comma-separated scheduler list"
    )
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                   help="parallel worker processes")
    p.add_argument("--trials", type=int, default=100, help="Monte Carlo trials per axis point")
    p.add_argument("--out", default=None, help="output path prefix (default: env "
                   f"{OUTDIR_ENV} or the working directory)")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")


def _constants_from(args) -> RadioConstants:
    lam = SPEED_OF_LIGHT_M_S / (args.carrier_ghz * 1e9)
    return RadioConstants(
        carrier_wavelength_m=lam,
        tx_power_w=args.tx_power_w,
        pathloss_exponent=args.pathloss_exp,
        mui_factor=args.mui_factor,
        transceiver_efficiency=args.efficiency,
        bandwidth_hz=args.bandwidth_mhz * 1e6,
        noise_psd_w_per_hz=dbm_per_mhz_to_w_per_hz(args.noise_dbm_mhz),
        pathloss_constant=friis_constant(lam),
        halfpower_beamwidth_deg=args.beamwidth_deg,
    )


def _params_from(args) -> GenParams:
    return GenParams(
        num_bs=args.bs,
        area_m=args.area_m,
        num_flows=args.flows,
        qos_low_bps=args.qos_low_gbps * 1e9,
        qos_high_bps=args.qos_high_gbps * 1e9,
        beta_low=args.beta_low,
        beta_high=args.beta_high,
        sigma=args.sigma,
        constants=_constants_from(args),
        timing=FrameTiming(
            slot_duration_s=args.slot_us * 1e-6,
            scheduling_phase_s=args.sched_phase_us * 1e-6,
            num_slots=args.slots,
        ),
    )


def _scheduler_list(parser: argparse.ArgumentParser, args) -> list[str]:
    names = [s for s in args.schedulers.split(",") if s]
    if not names:
        parser.error("empty scheduler list")
    for name in names:
        if name not in SCHEDULERS:
            parser.error(f"unknown scheduler {name!r}; valid: {DEFAULT_SCHEDULERS}")
    return names


def _out_prefix(args, default_name: str) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get(OUTDIR_ENV, ".")) / default_name


def emit(results, fmt: str, path) -> None:
    """Write sweep rows to ``path`` as CSV or JSON; bit-stable output."""
    if not results:
        raise ConfigurationError("nothing to emit")
    if fmt == "csv":
        engine.write_results_csv(results, path)
    else:
        payload = [dataclasses.asdict(r) for r in results]
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _emit_aggregates(aggs, fmt: str, path) -> None:
    if fmt == "csv":
        engine.write_aggregate_csv(aggs, path)
    else:
        payload = [dataclasses.asdict(a) for a in aggs]
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr)


def _run_sweep_command(parser, args, axis: str, values, default_name: str) -> int:
    names = _scheduler_list(parser, args)
    spec = engine.SweepSpec(
        axis=axis, axis_values=tuple(values), trials=args.trials, base=_params_from(args)
    )
    rows = engine.run_sweep(
        spec, names, args.seed, workers=args.workers, progress=_progress
    )
    prefix = _out_prefix(args, default_name)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    ext = args.format
    results_path = Path(f"{prefix}_results.{ext}")
    aggregate_path = Path(f"{prefix}_aggregate.{ext}")
    emit(rows, args.format, results_path)
    _emit_aggregates(engine.aggregate(rows), args.format, aggregate_path)
    _progress(f"wrote {results_path} and {aggregate_path}")
    return 0


def _parse_values(text: str, cast) -> list:
    """Parse '30,40,50' lists and 'lo..hi' inclusive integer ranges."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [cast(v) for v in text.split(",") if v]


def _absorb_negative_values(argv: list[str]) -> list[str]:
    """Join list-valued options with their argument so argparse doesn't
    mistake values like '-6,-5' or '-6..-1' for flags."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--magnitudes", "--values") and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdbackhaul",
        description="Full-duplex mmWave backhaul scheduling simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p_run = sub.add_parser("run", help="run schedulers on one scenario", formatter_class=fmt)
    p_run.add_argument("--scenario", default=None, help="scenario JSON file (overrides generation)")
    p_run.add_argument("--save-scenario", default=None, help="write the scenario JSON here")
    _add_gen_args(p_run, default_flows=90)
    _add_radio_args(p_run)
    _add_common_args(p_run)

    p_flows = sub.add_parser(
        "sweep-flows", help="metrics vs number of flows", formatter_class=fmt
    )
    p_flows.add_argument("--values", default="30,40,50,60,70,80,90",
                         help="comma-separated flow counts")
    _add_gen_args(p_flows, default_flows=90)
    _add_radio_args(p_flows)
    _add_common_args(p_flows)

    p_beta = sub.add_parser(
        "sweep-beta", help="metrics vs SI-cancelation magnitude", formatter_class=fmt
    )
    p_beta.add_argument("--magnitudes", default="0,1,2,3,4",
                        help="beta magnitudes x: beta ~ U[2,4] * 10^x")
    _add_gen_args(p_beta, default_flows=90)
    _add_radio_args(p_beta)
    _add_common_args(p_beta)

    p_sigma = sub.add_parser(
        "sweep-sigma", help="metrics vs contention-threshold magnitude", formatter_class=fmt
    )
    p_sigma.add_argument("--magnitudes", default="-6,-5,-4,-3,-2,-1",
                         help="sigma magnitudes x: sigma = 10^x")
    _add_gen_args(p_sigma, default_flows=90)
    _add_radio_args(p_sigma)
    _add_common_args(p_sigma)

    p_val = sub.add_parser("validate", help="validate a scenario JSON", formatter_class=fmt)
    p_val.add_argument("scenario", help="scenario JSON file")

    p_oracle = sub.add_parser(
        "oracle", help="exact optimum on a tiny scenario", formatter_class=fmt
    )
    p_oracle.add_argument("--scenario", default=None, help="scenario JSON file")
    _add_gen_args(p_oracle, default_flows=3)
    _add_radio_args(p_oracle, default_slots=6)  # exact search needs a tiny frame
    _add_common_args(p_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_absorb_negative_values(list(argv)))
    try:
        if args.command == "run":
            return _cmd_run(parser, args)
        if args.command == "sweep-flows":
            return _run_sweep_command(
                parser, args, "num_flows", _parse_values(args.values, int), "sweep_flows"
            )
        if args.command == "sweep-beta":
            return _run_sweep_command(
                parser, args, "beta_magnitude", _parse_values(args.magnitudes, int), "sweep_beta"
            )
        if args.command == "sweep-sigma":
            return _run_sweep_command(
                parser, args, "sigma_magnitude", _parse_values(args.magnitudes, int), "sweep_sigma"
            )
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "oracle":
            return _cmd_oracle(parser, args)
    except (ConfigurationError, BudgetError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError(f"unhandled command {args.command}")


def _load_or_generate(args):
    if args.scenario:
        return load_scenario(args.scenario)
    return generate(args.seed, _params_from(args))


def _cmd_run(parser, args) -> int:
    names = _scheduler_list(parser, args)
    scenario = _load_or_generate(args)
    problems = validate(scenario)
    if problems:
        print("invalid scenario:", ", ".join(problems), file=sys.stderr)
        return 1
    if args.save_scenario:
        save_scenario(scenario, args.save_scenario)
    report = {}
    for name in names:
        m = engine.run_trial(scenario, name)
        report[name] = {
            "completed": m.completed_count,
            "throughput_gbps": m.system_throughput / 1e9,
        }
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def _cmd_validate(args) -> int:
    scenario = load_scenario(args.scenario)
    problems = validate(scenario)
    if problems:
        for p in problems:
            print(p)
        return 1
    print("ok")
    return 0


def _cmd_oracle(parser, args) -> int:
    scenario = _load_or_generate(args)
    problems = validate(scenario)
    if problems:
        print("invalid scenario:", ", ".join(problems), file=sys.stderr)
        return 1
    optimum, allocation = oracle.solve_exact(scenario)
    report = {
        "optimal_completed": optimum,
        "allocation": [
            {"flows": list(flows), "slots": slots}
            for flows, slots in sorted(allocation.counts.items())
        ],
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
