"""Deterministic desk-scale fixed-wing 6-DOF simulator.

Rigid-body dynamics with a linear aerodynamic coefficient model, first-order
actuator lag with saturation, and stuck-surface fault injection.  Frames:
flat-earth north-east-down for position/velocity, body axes for rates, ZYX
Euler angles (roll, pitch, yaw) for attitude.  Integration is classical
fixed-step fourth-order Runge-Kutta; everything is noise-free and bit-exactly
repeatable.

The derivative and integrator cores are written against packed parameter
arrays so they can be JIT-compiled (numba, when available) without a second
implementation; the plain-Python path computes the identical formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .autopilot import RateMeasurements, SurfaceCommand

GRAVITY = 9.80665  # m/s^2

PITCH_ABORT = math.radians(89.0)

# surface vector layout used by ActuatorState and the fault injector
SURFACE_NAMES = ("left_aileron", "right_aileron", "elevator", "rudder")
STUCK_INDEX = {"left_aileron": 0, "elevator": 2, "rudder": 3}


class SimulationFault(RuntimeError):
    """Dynamics produced a non-finite derivative or left the valid envelope."""


@dataclass
class AircraftState:
    """Position, inertial velocity, Euler attitude, body angular rates."""

    r: np.ndarray  # (3,) north, east, down [m]
    v: np.ndarray  # (3,) velocity in the earth frame [m/s]
    euler: np.ndarray  # (3,) roll, pitch, yaw [rad]
    omega: np.ndarray  # (3,) body rates p, q, r [rad/s]

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float).reshape(3)
        self.v = np.asarray(self.v, dtype=float).reshape(3)
        self.euler = np.asarray(self.euler, dtype=float).reshape(3)
        self.omega = np.asarray(self.omega, dtype=float).reshape(3)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.r, self.v, self.euler, self.omega])

    @classmethod
    def from_vector(cls, y: np.ndarray) -> "AircraftState":
        y = np.asarray(y, dtype=float)
        return cls(r=y[0:3].copy(), v=y[3:6].copy(), euler=y[6:9].copy(), omega=y[9:12].copy())


@dataclass(frozen=True)
class AircraftParams:
    """Mass, geometry and the linear aerodynamic coefficient set.

    Lift/drag/side-force and moment coefficients are linear in angle of
    attack, sideslip, normalized body rates and surface deflections; the
    angle of attack is clamped to ``alpha_limit`` to stay inside the linear
    model's validity range.
    """

    mass: float
    ixx: float
    iyy: float
    izz: float
    wing_area: float
    span: float
    chord: float
    rho: float
    thrust_max: float

    lift0: float
    lift_alpha: float
    lift_q: float
    lift_elev: float
    drag0: float
    drag_alpha: float
    side_beta: float
    side_rud: float

    roll_beta: float
    roll_p: float
    roll_r: float
    roll_ail: float
    roll_rud: float
    pitch0: float
    pitch_alpha: float
    pitch_q: float
    pitch_elev: float
    yaw_beta: float
    yaw_p: float
    yaw_r: float
    yaw_ail: float
    yaw_rud: float

    cruise_airspeed: float
    alpha_limit: float = math.radians(20.0)
    surface_limit: float = math.radians(30.0)
    surface_tau: float = 0.02
    throttle_tau: float = 0.2

    # diagonal control allocation: commanded angular acceleration -> deflection
    alloc_roll: float = 0.0
    alloc_pitch: float = 0.0
    alloc_yaw: float = 0.0

    def __post_init__(self):
        if self.mass <= 0.0:
            raise ValueError("mass must be positive")
        if min(self.ixx, self.iyy, self.izz) <= 0.0:
            raise ValueError("inertia entries must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "AircraftParams":
        return cls(**d)

    def packed(self) -> np.ndarray:
        """Coefficient vector consumed by the dynamics core (cached)."""
        cached = self.__dict__.get("_packed")
        if cached is None:
            cached = np.array([getattr(self, f) for f in PACK_FIELDS])
            object.__setattr__(self, "_packed", cached)
        return cached


PACK_FIELDS = (
    "mass", "ixx", "iyy", "izz", "wing_area", "span", "chord", "rho",
    "thrust_max",
    "lift0", "lift_alpha", "lift_q", "lift_elev", "drag0", "drag_alpha",
    "side_beta", "side_rud",
    "roll_beta", "roll_p", "roll_r", "roll_ail", "roll_rud",
    "pitch0", "pitch_alpha", "pitch_q", "pitch_elev",
    "yaw_beta", "yaw_p", "yaw_r", "yaw_ail", "yaw_rud",
    "alpha_limit",
)


def _deriv_core(y, la, ra, el, ru, thr, pp, wn, we, wd):
    """Rigid-body state derivative from the packed coefficient vector."""
    vn, ve, vd = y[3], y[4], y[5]
    phi, th, psi = y[6], y[7], y[8]
    p, q, r = y[9], y[10], y[11]

    (mass, ixx, iyy, izz, wing_area, span, chord, rho, thrust_max,
     lift0, lift_alpha, lift_q, lift_elev, drag0, drag_alpha,
     side_beta, side_rud,
     roll_beta, roll_p, roll_r, roll_ail, roll_rud,
     pitch0, pitch_alpha, pitch_q, pitch_elev,
     yaw_beta, yaw_p, yaw_r, yaw_ail, yaw_rud,
     alpha_limit) = (
        pp[0], pp[1], pp[2], pp[3], pp[4], pp[5], pp[6], pp[7], pp[8],
        pp[9], pp[10], pp[11], pp[12], pp[13], pp[14],
        pp[15], pp[16],
        pp[17], pp[18], pp[19], pp[20], pp[21],
        pp[22], pp[23], pp[24], pp[25],
        pp[26], pp[27], pp[28], pp[29], pp[30],
        pp[31],
    )

    sphi, cphi = math.sin(phi), math.cos(phi)
    sth, cth = math.sin(th), math.cos(th)
    spsi, cpsi = math.sin(psi), math.cos(psi)
    # body -> earth rotation, ZYX
    r11 = cth * cpsi
    r12 = sphi * sth * cpsi - cphi * spsi
    r13 = cphi * sth * cpsi + sphi * spsi
    r21 = cth * spsi
    r22 = sphi * sth * spsi + cphi * cpsi
    r23 = cphi * sth * spsi - sphi * cpsi
    r31 = -sth
    r32 = sphi * cth
    r33 = cphi * cth

    # air-relative velocity resolved in body axes
    axn, axe, axd = vn - wn, ve - we, vd - wd
    u = r11 * axn + r21 * axe + r31 * axd
    v = r12 * axn + r22 * axe + r32 * axd
    w = r13 * axn + r23 * axe + r33 * axd
    va = math.sqrt(u * u + v * v + w * w)

    if va > 1e-6:
        alpha = math.atan2(w, u)
        if alpha > alpha_limit:
            alpha = alpha_limit
        elif alpha < -alpha_limit:
            alpha = -alpha_limit
        sb = v / va
        if sb > 1.0:
            sb = 1.0
        elif sb < -1.0:
            sb = -1.0
        beta = math.asin(sb)
        qbar = 0.5 * rho * va * va * wing_area
        two_va = 2.0 * va
        p_hat = span * p / two_va
        q_hat = chord * q / two_va
        r_hat = span * r / two_va
    else:
        alpha = beta = qbar = p_hat = q_hat = r_hat = 0.0

    da = 0.5 * (la - ra)  # roll-effective aileron deflection
    c_lift = lift0 + lift_alpha * alpha + lift_q * q_hat + lift_elev * el
    c_drag = drag0 + drag_alpha * alpha
    if c_drag < 0.0:
        c_drag = 0.0
    lift = qbar * c_lift
    drag = qbar * c_drag
    side = qbar * (side_beta * beta + side_rud * ru)

    sal, cal = math.sin(alpha), math.cos(alpha)
    fx = -drag * cal + lift * sal + thrust_max * thr
    fy = side
    fz = -drag * sal - lift * cal

    c_roll = (roll_beta * beta + roll_p * p_hat + roll_r * r_hat
              + roll_ail * da + roll_rud * ru)
    c_pitch = pitch0 + pitch_alpha * alpha + pitch_q * q_hat + pitch_elev * el
    c_yaw = (yaw_beta * beta + yaw_p * p_hat + yaw_r * r_hat
             + yaw_ail * da + yaw_rud * ru)
    ml = qbar * span * c_roll
    mm = qbar * chord * c_pitch
    mn = qbar * span * c_yaw

    out = np.empty(12)
    out[0] = vn
    out[1] = ve
    out[2] = vd
    inv_m = 1.0 / mass
    out[3] = (r11 * fx + r12 * fy + r13 * fz) * inv_m
    out[4] = (r21 * fx + r22 * fy + r23 * fz) * inv_m
    out[5] = (r31 * fx + r32 * fy + r33 * fz) * inv_m + 9.80665
    tth = sth / cth
    out[6] = p + tth * (q * sphi + r * cphi)
    out[7] = q * cphi - r * sphi
    out[8] = (q * sphi + r * cphi) / cth
    out[9] = (ml - (izz - iyy) * q * r) / ixx
    out[10] = (mm - (ixx - izz) * p * r) / iyy
    out[11] = (mn - (iyy - ixx) * p * q) / izz
    return out


def _rk4_core(y0, la, ra, el, ru, thr, pp, wn, we, wd, dt):
    """One classical RK4 step of the rigid-body equations."""
    k1 = _deriv_core(y0, la, ra, el, ru, thr, pp, wn, we, wd)
    y = np.empty(12)
    half = 0.5 * dt
    for i in range(12):
        y[i] = y0[i] + half * k1[i]
    k2 = _deriv_core(y, la, ra, el, ru, thr, pp, wn, we, wd)
    for i in range(12):
        y[i] = y0[i] + half * k2[i]
    k3 = _deriv_core(y, la, ra, el, ru, thr, pp, wn, we, wd)
    for i in range(12):
        y[i] = y0[i] + dt * k3[i]
    k4 = _deriv_core(y, la, ra, el, ru, thr, pp, wn, we, wd)
    out = np.empty(12)
    sixth = dt / 6.0
    for i in range(12):
        out[i] = y0[i] + sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
    return out


try:  # JIT the cores when numba is present; the plain functions work regardless
    import numba

    _deriv_core = numba.njit(cache=True)(_deriv_core)
    _rk4_core = numba.njit(cache=True)(_rk4_core)
except ImportError:  # pragma: no cover
    pass


@dataclass(frozen=True)
class FailureConfig:
    """Actuator-failure injection and fixed-gain detuning factor."""

    alpha_d: float = 1.0
    stuck_surface: str | None = None  # left_aileron | elevator | rudder
    stuck_angle: float = 0.0
    stuck_time: float = 0.0

    def __post_init__(self):
        if self.alpha_d < 0.0:
            raise ValueError("alpha_d must be nonnegative")
        if self.stuck_surface is not None and self.stuck_surface not in STUCK_INDEX:
            raise ValueError(
                f"stuck_surface must be one of {sorted(STUCK_INDEX)}, "
                f"got {self.stuck_surface!r}"
            )
        if self.stuck_time < 0.0:
            raise ValueError("stuck_time must be nonnegative")


@dataclass
class ActuatorState:
    """Commanded and actual deflections with first-order lag constants.

    Ailerons are split left/right and mixed from the single roll command
    (left = +cmd, right = -cmd), so a stuck left aileron leaves the right
    one operative.
    """

    actual: np.ndarray  # (4,) left_ail, right_ail, elevator, rudder [rad]
    commanded: np.ndarray  # (4,) same layout [rad]
    throttle: float
    throttle_cmd: float
    surface_tau: float
    throttle_tau: float
    surface_limit: float

    def __post_init__(self):
        self.actual = np.asarray(self.actual, dtype=float).reshape(4)
        self.commanded = np.asarray(self.commanded, dtype=float).reshape(4)

    @classmethod
    def at_trim(cls, params: AircraftParams, elevator: float, throttle: float) -> "ActuatorState":
        surf = np.array([0.0, 0.0, elevator, 0.0])
        return cls(
            actual=surf.copy(),
            commanded=surf.copy(),
            throttle=throttle,
            throttle_cmd=throttle,
            surface_tau=params.surface_tau,
            throttle_tau=params.throttle_tau,
            surface_limit=params.surface_limit,
        )


def apply_actuators(
    cmd: SurfaceCommand,
    act: ActuatorState,
    failure: FailureConfig,
    t: float,
    dt: float,
) -> ActuatorState:
    """Advance actuators one tick: lag toward the command, saturate, inject faults.

    The lag uses the exact discretization 1 - exp(-dt/tau).  From
    ``failure.stuck_time`` onward the faulted surface holds ``stuck_angle``
    exactly, regardless of command.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    la0, ra0, el0, ru0 = act.actual.tolist()
    k = 1.0 - math.exp(-dt / act.surface_tau)
    lim = act.surface_limit
    cla, cra, cel, cru = cmd.aileron, -cmd.aileron, cmd.elevator, cmd.rudder

    def lag(current, commanded):
        nxt = current + k * (commanded - current)
        return min(lim, max(-lim, nxt))

    actual = [lag(la0, cla), lag(ra0, cra), lag(el0, cel), lag(ru0, cru)]
    kt = 1.0 - math.exp(-dt / act.throttle_tau)
    throttle = act.throttle + kt * (cmd.throttle - act.throttle)
    throttle = min(1.0, max(0.0, throttle))
    if failure.stuck_surface is not None and t >= failure.stuck_time:
        actual[STUCK_INDEX[failure.stuck_surface]] = failure.stuck_angle
    return ActuatorState(
        actual=np.array(actual),
        commanded=np.array([cla, cra, cel, cru]),
        throttle=throttle,
        throttle_cmd=cmd.throttle,
        surface_tau=act.surface_tau,
        throttle_tau=act.throttle_tau,
        surface_limit=act.surface_limit,
    )


def step_dynamics(
    state: AircraftState,
    act: ActuatorState,
    params: AircraftParams,
    dt: float,
    wind: tuple[float, float, float] = (0.0, 0.0, 0.0),
) -> AircraftState:
    """Integrate one fixed step of the 6-DOF equations (classical RK4).

    Raises:
        ValueError: dt outside (0, 0.02].
        SimulationFault: non-finite derivative or pitch beyond +/-89 deg.
    """
    if not 0.0 < dt <= 0.02:
        raise ValueError(f"dt must be in (0, 0.02], got {dt}")
    la, ra, el, ru = act.actual.tolist()
    wn, we, wd = wind
    y = _rk4_core(
        state.as_vector(), la, ra, el, ru, act.throttle, params.packed(),
        wn, we, wd, dt,
    )
    if not np.isfinite(y).all():
        raise SimulationFault("non-finite state derivative")
    pitch = y[7]
    if abs(pitch) >= PITCH_ABORT:
        raise SimulationFault(
            f"pitch attitude {math.degrees(pitch):.1f} deg beyond the +/-89 deg envelope"
        )
    return AircraftState(r=y[0:3].copy(), v=y[3:6].copy(),
                         euler=y[6:9].copy(), omega=y[9:12].copy())


@dataclass(frozen=True)
class SensorData:
    """Noiseless measurement set: loop measurements plus position/velocity."""

    rates: RateMeasurements
    r_m: np.ndarray  # (3,)
    v_ground: np.ndarray  # (3,) inertial velocity (horizontal part is the ground track)
    psi_m: float


def read_sensors(
    state: AircraftState,
    params: AircraftParams,
    wind: tuple[float, float, float] = (0.0, 0.0, 0.0),
) -> SensorData:
    """Map the true state to the measurement set (zero noise, V_I = V_T at sea level)."""
    vn, ve, vd = state.v.tolist()
    wn, we, wd = wind
    an, ae, ad = vn - wn, ve - we, vd - wd
    v_true = math.sqrt(an * an + ae * ae + ad * ad)
    rates = RateMeasurements(
        omega_m=state.omega.copy(),
        v_true=v_true,
        v_indicated=v_true,
        roll_m=float(state.euler[0]),
        pitch_m=float(state.euler[1]),
    )
    return SensorData(
        rates=rates,
        r_m=state.r.copy(),
        v_ground=state.v.copy(),
        psi_m=float(state.euler[2]),
    )


@dataclass(frozen=True)
class TrimPoint:
    """Steady level-flight operating point (pitch equals angle of attack)."""

    airspeed: float
    alpha: float
    elevator: float
    throttle: float


def solve_trim(params: AircraftParams, v_true: float) -> TrimPoint:
    """Root-solve the force/moment balance for steady level flight.

    Unknowns are angle of attack, elevator deflection and throttle; the
    residual is the (north, down) acceleration and pitch angular
    acceleration at zero flight-path angle.
    """
    pp = params.packed()

    def residual(x):
        alpha, el, thr = x
        y = np.array([0.0, 0.0, 0.0, v_true, 0.0, 0.0,
                      0.0, alpha, 0.0, 0.0, 0.0, 0.0])
        d = _deriv_core(y, 0.0, 0.0, el, 0.0, thr, pp, 0.0, 0.0, 0.0)
        return [d[3], d[5], d[10]]

    sol = optimize.root(residual, x0=[0.03, 0.0, 0.4], method="hybr", tol=1e-12)
    if not sol.success or float(np.abs(sol.fun).max()) > 1e-8:
        raise SimulationFault(f"trim solve failed at V={v_true}: {sol.message}")
    alpha, elevator, throttle = (float(v) for v in sol.x)
    return TrimPoint(airspeed=v_true, alpha=alpha, elevator=elevator, throttle=throttle)


def trim_state(
    params: AircraftParams,
    trim: TrimPoint,
    position: np.ndarray,
    heading: float,
) -> tuple[AircraftState, ActuatorState]:
    """Aircraft and actuator state flying the trim point along ``heading``."""
    v = trim.airspeed * np.array([math.cos(heading), math.sin(heading), 0.0])
    state = AircraftState(
        r=np.asarray(position, dtype=float).copy(),
        v=v,
        euler=np.array([0.0, trim.alpha, heading]),
        omega=np.zeros(3),
    )
    act = ActuatorState.at_trim(params, trim.elevator, trim.throttle)
    return state, act
