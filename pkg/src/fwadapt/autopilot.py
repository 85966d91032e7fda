"""Cascaded fixed-wing controller with additive adaptive augmentation.

The cascade runs attitude P loops, an algebraic coordinated-turn yaw rate,
the Euler-rate-to-body-rate map, and a feedforward+PI body-rate loop,
followed by a diagonal control allocation.  Five independent adaptive loops
(pitch and roll attitude, three rate axes) add their outputs to the fixed
control laws; with adaptation disabled every contribution is exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .rcac import RcacHyperparams, RcacLoop

GRAVITY = 9.80665  # m/s^2

# adaptive loop keys, in cascade/logging order
ADAPTIVE_LOOPS = ("pitch", "roll", "roll_rate", "pitch_rate", "yaw_rate")


@dataclass(frozen=True)
class AutopilotGains:
    """The 11 fixed scalar gains of the cascade plus the trim airspeeds."""

    k_theta: float  # pitch attitude P [1/s]
    k_phi: float  # roll attitude P [1/s]
    k_ff: np.ndarray  # (3,) rate feedforward diagonal
    k_p: np.ndarray  # (3,) rate proportional diagonal
    k_i: np.ndarray  # (3,) rate integral diagonal
    v_trim_true: float  # m/s
    v_trim_indicated: float  # m/s

    def __post_init__(self):
        object.__setattr__(self, "k_ff", np.asarray(self.k_ff, dtype=float).reshape(3))
        object.__setattr__(self, "k_p", np.asarray(self.k_p, dtype=float).reshape(3))
        object.__setattr__(self, "k_i", np.asarray(self.k_i, dtype=float).reshape(3))
        if self.v_trim_true <= 0.0 or self.v_trim_indicated <= 0.0:
            raise ValueError("trim airspeeds must be positive")


def detune_gains(gains: AutopilotGains, alpha_d: float) -> AutopilotGains:
    """Scale all 11 gain scalars by ``alpha_d``; trim airspeeds unchanged."""
    if alpha_d < 0.0:
        raise ValueError(f"alpha_d must be nonnegative, got {alpha_d}")
    return replace(
        gains,
        k_theta=alpha_d * gains.k_theta,
        k_phi=alpha_d * gains.k_phi,
        k_ff=alpha_d * gains.k_ff,
        k_p=alpha_d * gains.k_p,
        k_i=alpha_d * gains.k_i,
    )


@dataclass(frozen=True)
class AttitudeSetpoint:
    roll_s: float  # rad
    pitch_s: float  # rad
    thrust_s: float  # normalized 0..1

    def __post_init__(self):
        if not (math.isfinite(self.roll_s) and math.isfinite(self.pitch_s)):
            raise ValueError("attitude setpoint must be finite")
        if abs(self.roll_s) >= math.pi / 2:
            raise ValueError("|roll setpoint| must be below 90 deg")
        if not 0.0 <= self.thrust_s <= 1.0:
            raise ValueError("thrust setpoint must be within [0, 1]")


@dataclass(frozen=True)
class RateMeasurements:
    omega_m: np.ndarray  # (3,) body rates [rad/s]
    v_true: float  # m/s
    v_indicated: float  # m/s
    roll_m: float  # rad
    pitch_m: float  # rad

    def __post_init__(self):
        object.__setattr__(
            self, "omega_m", np.asarray(self.omega_m, dtype=float).reshape(3)
        )
        if self.v_true <= 0.0 or self.v_indicated <= 0.0:
            raise ValueError("airspeeds must be positive")


@dataclass(frozen=True)
class SurfaceCommand:
    aileron: float  # rad
    elevator: float  # rad
    rudder: float  # rad
    throttle: float  # normalized 0..1


@dataclass(frozen=True)
class AllocationParams:
    """Diagonal map from angular-acceleration setpoint to surface deflection.

    The constants approximately invert the plant's moment map at trim; they
    come from the aircraft parameter file.
    """

    alloc_roll: float  # rad per rad/s^2
    alloc_pitch: float
    alloc_yaw: float
    surface_limit: float  # rad


class AdaptiveSet:
    """The five adaptive loops of the augmented cascade.

    When ``enabled`` is false no loop exists and every contribution is
    exactly 0.0.  ``pin_gains_zero`` keeps the adaptation running but forces
    the gains (and therefore the outputs) to zero after every update, which
    must reproduce the disabled behavior bit for bit.
    """

    def __init__(
        self,
        params: dict[str, RcacHyperparams] | None,
        enabled: bool = True,
        pin_gains_zero: bool = False,
    ):
        self.enabled = enabled and params is not None
        self.loops: dict[str, RcacLoop] = {}
        if self.enabled:
            missing = [k for k in ADAPTIVE_LOOPS if k not in params]
            if missing:
                raise ValueError(f"missing adaptive loop hyperparameters: {missing}")
            self.loops = {
                key: RcacLoop(params[key], pin_gains_zero=pin_gains_zero)
                for key in ADAPTIVE_LOOPS
            }

    def contribution(self, key: str, z: float) -> float:
        """Adaptive control for one loop, folding in the new error sample."""
        if not self.enabled:
            return 0.0
        return self.loops[key].advance(z)

    def gain_columns(self) -> list[float]:
        """Flattened gain vectors in ``ADAPTIVE_LOOPS`` order (zeros when disabled)."""
        if not self.enabled:
            return [0.0] * (2 * len(ADAPTIVE_LOOPS))
        out: list[float] = []
        for key in ADAPTIVE_LOOPS:
            theta = self.loops[key].theta.tolist()
            out.append(theta[0])
            out.append(theta[1] if len(theta) > 1 else 0.0)
        return out

    def total_gain_norm(self) -> float:
        """Sum of the gain-vector 2-norms over all loops."""
        if not self.enabled:
            return 0.0
        return float(
            sum(np.linalg.norm(self.loops[key].theta) for key in ADAPTIVE_LOOPS)
        )


def attitude_outer_loop(
    sp: AttitudeSetpoint,
    meas: RateMeasurements,
    gains: AutopilotGains,
    adaptive: AdaptiveSet,
) -> tuple[float, float]:
    """Pitch- and roll-rate setpoints from the attitude errors.

    Proportional laws plus the adaptive contributions driven by the same
    errors.  Returns ``(pitch_rate_s, roll_rate_s)`` in rad/s.
    """
    z_pitch = sp.pitch_s - meas.pitch_m
    z_roll = sp.roll_s - meas.roll_m
    u_pitch = adaptive.contribution("pitch", z_pitch)
    u_roll = adaptive.contribution("roll", z_roll)
    return gains.k_theta * z_pitch + u_pitch, gains.k_phi * z_roll + u_roll


def coordinated_turn_rate(roll_s: float, pitch_s: float, v_true: float) -> float:
    """Yaw rate that keeps the commanded turn coordinated (zero sideslip)."""
    if v_true <= 0.0:
        raise ValueError("v_true must be positive")
    if abs(roll_s) >= math.pi / 2:
        raise ValueError("|roll setpoint| must be below 90 deg")
    return GRAVITY * math.tan(roll_s) * math.cos(pitch_s) / v_true


def euler_rates_to_body(
    pitch_m: float,
    roll_m: float,
    euler_rates: np.ndarray,
    pitch_cross_sign: float = -1.0,
) -> np.ndarray:
    """Map Euler-angle rate setpoints to a body-rate setpoint.

    ``euler_rates`` is ordered (roll rate, pitch rate, yaw rate).  The
    standard kinematic map puts -sin(pitch) in the roll row's yaw column;
    ``pitch_cross_sign=+1`` selects the opposite sign variant that appears
    in some references.
    """
    phi_d, theta_d, psi_d = (float(x) for x in euler_rates)
    sphi, cphi = math.sin(roll_m), math.cos(roll_m)
    sth, cth = math.sin(pitch_m), math.cos(pitch_m)
    return np.array(
        [
            phi_d + pitch_cross_sign * sth * psi_d,
            cphi * theta_d + sphi * cth * psi_d,
            -sphi * theta_d + cphi * cth * psi_d,
        ]
    )


def rate_loop(
    omega_s: np.ndarray,
    meas: RateMeasurements,
    gains: AutopilotGains,
    adaptive: AdaptiveSet,
    integrator: np.ndarray,
    dt: float,
    integrator_clamp: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Angular-acceleration setpoint from the body-rate errors.

    Airspeed-scaled feedforward plus PI on the rate error, plus one adaptive
    contribution per axis.  The integral term uses the accumulated value and
    the integrator is then advanced with the current error, so the integral
    at step k reflects errors through step k-1.

    Returns ``(alpha_s, integrator_next)``.
    """
    if meas.v_true <= 0.0 or meas.v_indicated <= 0.0:
        raise ValueError("airspeeds must be positive")
    omega_s = np.asarray(omega_s, dtype=float).reshape(3)
    e = omega_s - meas.omega_m
    u_ad = np.array(
        [
            adaptive.contribution("roll_rate", e[0]),
            adaptive.contribution("pitch_rate", e[1]),
            adaptive.contribution("yaw_rate", e[2]),
        ]
    )
    scale_ff = gains.v_trim_true / meas.v_true
    scale_pi = (gains.v_trim_indicated / meas.v_indicated) ** 2
    alpha_s = (
        scale_ff * gains.k_ff * omega_s
        + scale_pi * (gains.k_p * e + gains.k_i * integrator)
        + u_ad
    )
    integrator_next = np.clip(
        integrator + dt * e, -integrator_clamp, integrator_clamp
    )
    return alpha_s, integrator_next


def allocate_controls(
    alpha_s: np.ndarray, thrust_s: float, alloc: AllocationParams
) -> SurfaceCommand:
    """Diagonal allocation from angular-acceleration setpoint to deflections.

    Stuck-surface faults are injected downstream at the actuator stage;
    allocation is unaware of them.
    """
    alpha_s = np.asarray(alpha_s, dtype=float).reshape(3)
    if not np.isfinite(alpha_s).all():
        raise ValueError("alpha_s must be finite")
    lim = alloc.surface_limit
    clip = lambda x: min(lim, max(-lim, x))
    return SurfaceCommand(
        aileron=clip(alloc.alloc_roll * alpha_s[0]),
        elevator=clip(alloc.alloc_pitch * alpha_s[1]),
        rudder=clip(alloc.alloc_yaw * alpha_s[2]),
        throttle=min(1.0, max(0.0, thrust_s)),
    )


class CascadedAutopilot:
    """Per-tick wiring of the attitude/rate cascade and allocation.

    Holds the rate-loop integrator and the adaptive loops; stepped once per
    inner tick in a fixed order (attitude, coordinated turn, rate map, rate
    loop, allocation).
    """

    def __init__(
        self,
        gains: AutopilotGains,
        alloc: AllocationParams,
        adaptive: AdaptiveSet,
        dt: float,
        rate_integrator_clamp: float = 1.0,
    ):
        self.gains = gains
        self.alloc = alloc
        self.adaptive = adaptive
        self.dt = dt
        self.rate_integrator_clamp = rate_integrator_clamp
        self.rate_integrator = np.zeros(3)

    def tick(
        self, sp: AttitudeSetpoint, meas: RateMeasurements
    ) -> tuple[SurfaceCommand, np.ndarray]:
        """One control tick; returns the surface command and the rate setpoint."""
        pitch_rate_s, roll_rate_s = attitude_outer_loop(
            sp, meas, self.gains, self.adaptive
        )
        yaw_rate_s = coordinated_turn_rate(sp.roll_s, sp.pitch_s, meas.v_true)
        omega_s = euler_rates_to_body(
            meas.pitch_m, meas.roll_m, (roll_rate_s, pitch_rate_s, yaw_rate_s)
        )
        alpha_s, self.rate_integrator = rate_loop(
            omega_s,
            meas,
            self.gains,
            self.adaptive,
            self.rate_integrator,
            self.dt,
            self.rate_integrator_clamp,
        )
        cmd = allocate_controls(alpha_s, sp.thrust_s, self.alloc)
        return cmd, omega_s
