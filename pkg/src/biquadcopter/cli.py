"""Command-line entry point: run a scenario, print a summary, write a CSV."""
from __future__ import annotations

import argparse
import sys

from .allocation import FailureMode
from .harness import ScenarioConfig, format_summary, run_scenario, summarize, write_csv
from .params import ParamError, default_params, load_params

_FAILURES = {
    "none": None,
    "bottom3": FailureMode.one_bottom_out(3),
    "bottom4": FailureMode.one_bottom_out(4),
    "bottom-both": FailureMode.both_bottom_out(),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biquadcopter",
        description="Closed-loop bi-quadcopter simulation")
    parser.add_argument("scenario", choices=("hover", "circle", "file"),
                        help="reference trajectory kind")
    parser.add_argument("--duration", type=float, default=40.0,
                        help="simulated time in seconds (default 40)")
    parser.add_argument("--physics-dt", type=float, default=1e-3,
                        help="integrator step in seconds (default 0.001)")
    parser.add_argument("--control-dt", type=float, default=None,
                        help="control period, an integer multiple of the "
                             "physics step (default: equal to it)")
    parser.add_argument("--failure", choices=sorted(_FAILURES), default="none",
                        help="bottom-rotor failure to inject")
    parser.add_argument("--failure-time", type=float, default=None,
                        help="when the failure hits, in seconds "
                             "(requires --failure; omit to start failed)")
    parser.add_argument("--params", metavar="FILE", default=None,
                        help="YAML file overriding vehicle/controller parameters")
    parser.add_argument("--out", metavar="FILE", default=None,
                        help="write the log as CSV to this path")
    parser.add_argument("--hover-point", type=float, nargs=3, default=(0.0, 0.0, 4.0),
                        metavar=("X", "Y", "Z"),
                        help="hover setpoint (default 0 0 4)")
    parser.add_argument("--hover-psi", type=float, default=0.0,
                        help="hover yaw in radians (default 0)")
    parser.add_argument("--trajectory-file", metavar="FILE", default=None,
                        help="reference file for the 'file' scenario: rows of "
                             "t, position(3), velocity(3), acceleration(3), yaw")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.failure_time is not None and args.failure == "none":
        parser.error("--failure-time requires --failure")
    if args.scenario == "file" and args.trajectory_file is None:
        parser.error("the 'file' scenario requires --trajectory-file")

    if args.params is not None:
        try:
            with open(args.params) as fh:
                params, gains = load_params(fh.read())
        except OSError as exc:
            parser.error(f"cannot read --params file: {exc}")
        except ParamError as exc:
            parser.error(f"bad --params file: {exc}")
    else:
        params, gains = default_params()

    failure = _FAILURES[args.failure]
    try:
        config = ScenarioConfig(
            trajectory=args.scenario,
            hover_point=tuple(args.hover_point),
            hover_psi=args.hover_psi,
            trajectory_path=args.trajectory_file,
            duration=args.duration,
            physics_dt=args.physics_dt,
            control_dt=args.control_dt,
            failure=failure if failure is not None else FailureMode.nominal(),
            failure_time=args.failure_time)
        result = run_scenario(config, params=params, gains=gains)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if args.out:
        write_csv(result.records, args.out)
    print(format_summary(summarize(result.records)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
