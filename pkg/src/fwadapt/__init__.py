"""Adaptive fixed-wing autopilot testbed.

Retrospective-cost gain adaptation layered on a cascaded PX4-style
fixed-wing controller, exercised against a deterministic desk-scale 6-DOF
simulator with gain-detuning and stuck-surface experiments.
"""

from .autopilot import (
    AdaptiveSet,
    AllocationParams,
    AttitudeSetpoint,
    AutopilotGains,
    CascadedAutopilot,
    RateMeasurements,
    SurfaceCommand,
    allocate_controls,
    attitude_outer_loop,
    coordinated_turn_rate,
    detune_gains,
    euler_rates_to_body,
    rate_loop,
)
from .config import ScenarioConfig, default_scenario, load_scenario
from .flightlog import FlightLog
from .metrics import MetricReport, compute_metrics, normalize
from .mission import (
    MissionComplete,
    MissionPlan,
    PathSegment,
    Waypoint,
    advance_mission,
    cross_track_error,
)
from .position import PositionController, PositionGains
from .rcac import (
    DivergenceError,
    Parameterization,
    RcacHistory,
    RcacHyperparams,
    RcacLoop,
    RcacState,
    batch_argmin,
    build_regressor,
    covariance_update,
    rcac_step,
    retrospective_performance,
)
from .scenario import MatrixResult, RunResult, run_matrix, run_scenario
from .vehicle import (
    ActuatorState,
    AircraftParams,
    AircraftState,
    FailureConfig,
    SimulationFault,
    apply_actuators,
    read_sensors,
    solve_trim,
    step_dynamics,
    trim_state,
)

__version__ = "0.1.0"
