"""Command-line front end: run scenarios, experiment matrices, and metrics.

Exit codes: 0 success, 1 usage/config error, 2 divergence fault,
3 mission incomplete.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import scenario as scn
from .config import load_scenario
from .flightlog import FlightLog
from .metrics import compute_metrics

OUT_ENV = "FWADAPT_OUT"


def _default_out() -> Path:
    return Path(os.environ.get(OUT_ENV, "fwadapt_out"))


def _parse_stuck(spec: str) -> tuple[float, float]:
    """Parse '<angle_rad>@<time_s>', e.g. '0.05@10'."""
    try:
        angle, at = spec.split("@")
        return float(angle), float(at)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected <angle_rad>@<time_s>, got {spec!r}"
        ) from exc


def _apply_overrides(config, args):
    kwargs = {}
    if args.alpha_d is not None:
        kwargs["alpha_d"] = args.alpha_d
    if args.adaptive is not None:
        kwargs["adaptive"] = args.adaptive == "on"
    if args.duration is not None:
        kwargs["duration"] = args.duration
    if args.stuck_left_aileron is not None:
        angle, at = args.stuck_left_aileron
        kwargs.update(stuck_surface="left_aileron", stuck_angle=angle, stuck_time=at)
    return config.with_updates(**kwargs) if kwargs else config


def _add_override_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", type=Path, default=None, help="output directory")
    p.add_argument("--duration", type=float, default=None, help="flight duration [s]")
    p.add_argument("--alpha-d", type=float, default=None, help="gain detuning factor")
    p.add_argument("--adaptive", choices=["on", "off"], default=None)
    p.add_argument(
        "--stuck-left-aileron",
        type=_parse_stuck,
        default=None,
        metavar="RAD@T",
        help="freeze the left aileron at RAD from T seconds on",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fwadapt",
        description="Adaptive fixed-wing autopilot experiments in a deterministic simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario")
    p_run.add_argument("config", type=Path, help="scenario YAML file")
    _add_override_flags(p_run)

    p_matrix = sub.add_parser("matrix", help="run a scenario matrix with a benchmark")
    p_matrix.add_argument("configs", type=Path, nargs="+", help="scenario YAML files")
    p_matrix.add_argument(
        "--benchmark", required=True, help="name of the normalization scenario"
    )
    _add_override_flags(p_matrix)

    p_metrics = sub.add_parser("metrics", help="recompute metrics from a flight log")
    p_metrics.add_argument("log", type=Path, help="log.csv produced by a run")
    p_metrics.add_argument("--warmup", type=float, default=0.0)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            config = _apply_overrides(load_scenario(args.config), args)
            out = args.out if args.out is not None else _default_out()
            result = scn.run_scenario(config, out_dir=out)
            sys.stdout.write(scn.metrics_summary(result))
            return result.exit_code
        if args.command == "matrix":
            configs = [
                _apply_overrides(load_scenario(path), args) for path in args.configs
            ]
            out = args.out if args.out is not None else _default_out()
            matrix = scn.run_matrix(configs, args.benchmark, out_dir=out)
            sys.stdout.write(scn.comparison_table(matrix))
            worst = max(r.exit_code for r in matrix.results.values())
            return worst
        if args.command == "metrics":
            log = FlightLog.read_csv(args.log)
            m = compute_metrics(log, warmup=args.warmup)
            sys.stdout.write(
                f"j_phi_rad: {m.j_phi:.9g}\n"
                f"j_theta_rad: {m.j_theta:.9g}\n"
                f"j_traj_m: {m.j_traj:.9g}\n"
            )
            return 0
    except (ValueError, FileNotFoundError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
