"""Deterministic scenario execution and experiment matrices.

One run is a fixed-step tick loop at the inner rate: sense, sequence the
mission, update the position controller at its divider, run the cascade and
adaptation, allocate, actuate, log, integrate.  Identical configurations
produce byte-identical logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path


from .autopilot import (
    AdaptiveSet,
    AllocationParams,
    AttitudeSetpoint,
    CascadedAutopilot,
    detune_gains,
)
from .config import ScenarioConfig
from .flightlog import FlightLog
from .metrics import MetricReport, compute_metrics, normalize
from .mission import MissionComplete, advance_mission, cross_track_error
from .position import PositionController
from .rcac import DivergenceError
from .vehicle import (
    SimulationFault,
    apply_actuators,
    read_sensors,
    solve_trim,
    step_dynamics,
    trim_state,
)

STATUS_SUCCESS = "success"
STATUS_DIVERGED = "diverged"
STATUS_INCOMPLETE = "incomplete"

EXIT_CODES = {STATUS_SUCCESS: 0, STATUS_DIVERGED: 2, STATUS_INCOMPLETE: 3}


@dataclass
class RunResult:
    name: str
    status: str
    log: FlightLog
    metrics: MetricReport
    waypoints_reached: list[int]
    terminal_gain_norm: float  # sum of adaptive gain-vector norms at the end
    detail: str = ""

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]


def run_scenario(config: ScenarioConfig, out_dir: str | Path | None = None) -> RunResult:
    """Execute one scenario; optionally write its log and metric summary."""
    config.validate()
    params = config.aircraft
    gains = detune_gains(config.gains, config.alpha_d)
    plan = config.mission
    dt = config.dt

    active_index = 1 % len(plan)
    target = plan.waypoints[active_index]
    trim = solve_trim(params, target.airspeed_s)
    first_leg = plan.segment_to(active_index)
    heading = math.atan2(
        first_leg.end[1] - first_leg.start[1], first_leg.end[0] - first_leg.start[0]
    )
    state, act = trim_state(params, trim, plan.waypoints[0].position, heading)

    adaptive = AdaptiveSet(
        config.rcac if config.adaptive else None,
        enabled=config.adaptive,
        pin_gains_zero=config.pin_gains_zero,
    )
    autopilot = CascadedAutopilot(
        gains,
        AllocationParams(
            params.alloc_roll, params.alloc_pitch, params.alloc_yaw, params.surface_limit
        ),
        adaptive,
        dt,
        config.rate_integrator_clamp,
    )
    position = PositionController(
        config.position,
        pitch_trim=trim.alpha,
        throttle_trim=trim.throttle,
        dt=dt * config.position_divider,
    )

    r_s = target.position.copy()
    v_s = target.airspeed_s
    segment = first_leg
    att_sp = AttitudeSetpoint(0.0, trim.alpha, min(1.0, max(0.0, trim.throttle)))

    n_ticks = int(round(config.duration / dt))
    buf = FlightLog.allocate(n_ticks)
    reached: set[int] = set()
    mission_done = False
    status = STATUS_SUCCESS
    detail = ""
    filled = 0

    try:
        for i in range(n_ticks):
            t = i * dt
            sens = read_sensors(state, params, config.wind)
            if i % config.mission_divider == 0 and not mission_done:
                try:
                    previous = active_index
                    r_s, v_s, segment, active_index = advance_mission(
                        plan, sens.r_m, active_index
                    )
                    if active_index != previous:
                        reached.add(previous)
                except MissionComplete:
                    reached.add(active_index)
                    mission_done = True
            if i % config.position_divider == 0:
                att_sp = position.update(
                    r_s, v_s, sens.r_m, sens.rates.v_true, sens.v_ground, segment
                )
            cmd, omega_s = autopilot.tick(att_sp, sens.rates)
            e_xt = cross_track_error(sens.r_m, plan)
            buf[i] = (
                t,
                att_sp.roll_s,
                sens.rates.roll_m,
                att_sp.pitch_s,
                sens.rates.pitch_m,
                sens.psi_m,
                e_xt,
                omega_s[0],
                omega_s[1],
                omega_s[2],
                sens.rates.omega_m[0],
                sens.rates.omega_m[1],
                sens.rates.omega_m[2],
                *adaptive.gain_columns(),
                cmd.aileron,
                cmd.elevator,
                cmd.rudder,
                cmd.throttle,
                sens.r_m[0],
                sens.r_m[1],
                sens.r_m[2],
                sens.v_ground[0],
                sens.v_ground[1],
                sens.v_ground[2],
                sens.rates.v_true,
            )
            filled = i + 1
            act = apply_actuators(cmd, act, config.failure, t, dt)
            state = step_dynamics(state, act, params, dt, config.wind)
    except (DivergenceError, SimulationFault) as exc:
        status = STATUS_DIVERGED
        detail = f"tick {filled}: {exc}"

    if filled == 0:
        raise SimulationFault(f"{config.name}: no ticks completed ({detail})")
    log = FlightLog(buf[:filled])
    metrics = compute_metrics(log)

    all_reached = reached >= set(range(len(plan)))
    if status == STATUS_SUCCESS:
        complete = mission_done if not plan.loop else all_reached
        if not complete:
            status = STATUS_INCOMPLETE
            detail = f"waypoints reached: {sorted(reached)} of {len(plan)}"

    result = RunResult(
        name=config.name,
        status=status,
        log=log,
        metrics=metrics,
        waypoints_reached=sorted(reached),
        terminal_gain_norm=adaptive.total_gain_norm(),
        detail=detail,
    )
    if out_dir is not None:
        write_run_outputs(result, Path(out_dir))
    return result


def _fmt(x: float) -> str:
    return "%.9g" % x


def metrics_summary(result: RunResult) -> str:
    """Structured text block for the run report."""
    lines = [
        f"scenario: {result.name}",
        f"status: {result.status}",
        f"records: {len(result.log)}",
        f"j_phi_rad: {_fmt(result.metrics.j_phi)}",
        f"j_theta_rad: {_fmt(result.metrics.j_theta)}",
        f"j_traj_m: {_fmt(result.metrics.j_traj)}",
        f"waypoints_reached: {','.join(str(i) for i in result.waypoints_reached)}",
        f"terminal_gain_norm: {_fmt(result.terminal_gain_norm)}",
    ]
    if result.metrics.norm_phi is not None:
        lines += [
            f"norm_phi: {_fmt(result.metrics.norm_phi)}",
            f"norm_theta: {_fmt(result.metrics.norm_theta)}",
            f"norm_traj: {_fmt(result.metrics.norm_traj)}",
        ]
    if result.detail:
        lines.append(f"detail: {result.detail}")
    return "\n".join(lines) + "\n"


GAIN_COLUMNS = (
    "rcac_pitch_kp_1_s", "rcac_pitch_ki_1_s2",
    "rcac_roll_kp_1_s", "rcac_roll_ki_1_s2",
    "rcac_p_kp_1_s", "rcac_p_ki_1_s2",
    "rcac_q_kp_1_s", "rcac_q_ki_1_s2",
    "rcac_r_kp_1_s", "rcac_r_ki_1_s2",
)


def write_run_outputs(result: RunResult, out_dir: Path) -> Path:
    run_dir = out_dir / result.name
    run_dir.mkdir(parents=True, exist_ok=True)
    result.log.write_csv(run_dir / "log.csv")
    (run_dir / "metrics.txt").write_text(metrics_summary(result))
    # per-loop adaptive gain traces, sliced out of the log for convenience
    columns = ("time_s",) + GAIN_COLUMNS
    lines = [",".join(columns)]
    arrays = [result.log.column(c) for c in columns]
    for row in zip(*arrays):
        lines.append(",".join(_fmt(v) for v in row))
    (run_dir / "gains.csv").write_text("\n".join(lines) + "\n")
    return run_dir


@dataclass
class MatrixResult:
    benchmark: str
    results: dict[str, RunResult]

    def table_rows(self) -> list[tuple]:
        rows = []
        for name, res in self.results.items():
            m = res.metrics
            rows.append(
                (name, res.status, m.j_phi, m.j_theta, m.j_traj,
                 m.norm_phi, m.norm_theta, m.norm_traj)
            )
        return rows


def run_matrix(
    configs: list[ScenarioConfig],
    benchmark_name: str | None = None,
    out_dir: str | Path | None = None,
) -> MatrixResult:
    """Run a scenario list, normalizing every run by the benchmark run.

    Exactly one scenario must be the benchmark, either by ``benchmark_name``
    or by its ``benchmark`` config flag.  A failed benchmark aborts the
    matrix.
    """
    if not configs:
        raise ValueError("empty scenario list")
    names = [c.name for c in configs]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate scenario names: {names}")
    if benchmark_name is None:
        flagged = [c.name for c in configs if c.benchmark]
        if len(flagged) != 1:
            raise ValueError(
                "exactly one scenario must be marked as the benchmark "
                f"(found {flagged})"
            )
        benchmark_name = flagged[0]
    if benchmark_name not in names:
        raise ValueError(f"benchmark {benchmark_name!r} is not among {names}")

    out_dir = Path(out_dir) if out_dir is not None else None
    ordered = sorted(configs, key=lambda c: c.name != benchmark_name)
    results: dict[str, RunResult] = {}
    benchmark_metrics: MetricReport | None = None
    for cfg in ordered:
        res = run_scenario(cfg)
        if cfg.name == benchmark_name:
            if res.status == STATUS_DIVERGED:
                raise RuntimeError(
                    f"benchmark run {cfg.name!r} diverged: {res.detail}"
                )
            benchmark_metrics = res.metrics
        res.metrics = normalize(res.metrics, benchmark_metrics)
        results[cfg.name] = res
        if out_dir is not None:
            write_run_outputs(res, out_dir)

    matrix = MatrixResult(benchmark=benchmark_name, results=results)
    if out_dir is not None:
        write_matrix_outputs(matrix, out_dir)
    return matrix


def comparison_table(matrix: MatrixResult) -> str:
    """Normalized-metric comparison as CSV text."""
    lines = [
        "scenario,status,j_phi_rad,j_theta_rad,j_traj_m,norm_phi,norm_theta,norm_traj"
    ]
    for row in matrix.table_rows():
        name, status, *values = row
        lines.append(",".join([name, status] + [_fmt(v) for v in values]))
    return "\n".join(lines) + "\n"


def write_matrix_outputs(matrix: MatrixResult, out_dir: Path) -> None:
    from . import plots  # deferred: pulls in matplotlib

    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "comparison.csv").write_text(comparison_table(matrix))
    plots.plot_trajectories(matrix, out_dir / "trajectories.svg")
    plots.plot_gain_traces(matrix, out_dir / "gain_traces.svg")
    plots.plot_metric_bars(matrix, out_dir / "metrics.svg")
