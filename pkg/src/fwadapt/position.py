"""Position controller: energy-based longitudinal law and pursuit lateral law.

Longitudinal control follows the total-energy idea: throttle works the total
specific-energy rate, pitch works the balance between climbing and
accelerating.  Lateral control chases a reference point a fixed distance
ahead on the active path segment and converts the resulting lateral
acceleration into a bank setpoint.  Both are deliberately small stand-ins
that honor the interface (altitude/airspeed setpoints in, thrust/attitude
setpoint out); their gains are separate from the 11 cascade gains and are
never detuned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .autopilot import GRAVITY, AttitudeSetpoint
from .mission import PathSegment


@dataclass(frozen=True)
class PositionGains:
    l1_distance: float = 50.0  # pursuit lookahead along the path [m]
    k_alt: float = 0.6  # climb-rate demand per altitude error [1/s]
    climb_rate_max: float = 3.0  # m/s
    k_speed: float = 0.6  # accel demand per airspeed error [1/s]
    accel_max: float = 2.0  # m/s^2
    k_thrust_p: float = 0.012  # throttle per specific-power error [s^3/m^2]
    k_thrust_i: float = 0.004
    thrust_integrator_clamp: float = 40.0
    k_pitch_balance: float = 0.008  # rad per specific-power balance error
    max_bank: float = math.radians(45.0)
    max_pitch: float = math.radians(30.0)


class PositionController:
    """Stateful outer loop running at its own (slower) rate."""

    def __init__(
        self,
        gains: PositionGains,
        pitch_trim: float,
        throttle_trim: float,
        dt: float,
    ):
        self.gains = gains
        self.pitch_trim = pitch_trim
        self.throttle_trim = throttle_trim
        self.dt = dt
        self._thrust_integrator = 0.0
        self._v_prev: float | None = None

    def update(
        self,
        r_s: np.ndarray,
        v_airspeed_s: float,
        r_m: np.ndarray,
        v_true: float,
        v_ground: np.ndarray,
        path: PathSegment,
    ) -> AttitudeSetpoint:
        """Thrust and attitude setpoints from position/airspeed targets.

        ``v_ground`` is the full inertial velocity; its horizontal part is
        the ground track used by the pursuit law and its vertical part gives
        the measured climb rate.
        """
        if v_true <= 0.0:
            raise ValueError("v_true must be positive")
        g = self.gains
        r_s = np.asarray(r_s, dtype=float).reshape(3)
        r_m = np.asarray(r_m, dtype=float).reshape(3)
        v_ground = np.asarray(v_ground, dtype=float).reshape(3)

        roll_s = self._lateral(r_m, v_ground, path)

        # energy terms, per unit mass; altitude is up-positive (-down)
        alt_err = r_m[2] - r_s[2]
        climb_dem = _clip(g.k_alt * alt_err, g.climb_rate_max)
        accel_dem = _clip(g.k_speed * (v_airspeed_s - v_true), g.accel_max)
        climb_m = -float(v_ground[2])
        if self._v_prev is None:
            accel_m = 0.0
        else:
            accel_m = (v_true - self._v_prev) / self.dt
        self._v_prev = v_true

        power_err = GRAVITY * (climb_dem - climb_m) + v_true * (accel_dem - accel_m)
        balance_err = GRAVITY * (climb_dem - climb_m) - v_true * (accel_dem - accel_m)

        thrust = (
            self.throttle_trim
            + g.k_thrust_p * power_err
            + g.k_thrust_i * self._thrust_integrator
        )
        saturated_same_sign = (thrust <= 0.0 and power_err < 0.0) or (
            thrust >= 1.0 and power_err > 0.0
        )
        if not saturated_same_sign:
            self._thrust_integrator = _clip(
                self._thrust_integrator + power_err * self.dt,
                g.thrust_integrator_clamp,
            )
        thrust = min(1.0, max(0.0, thrust))

        pitch_s = _clip(self.pitch_trim + g.k_pitch_balance * balance_err, g.max_pitch)
        return AttitudeSetpoint(roll_s=roll_s, pitch_s=pitch_s, thrust_s=thrust)

    def _lateral(self, r_m, v_ground, path: PathSegment) -> float:
        """Bank setpoint from pursuit of a point ``l1_distance`` ahead on the path."""
        g = self.gains
        a = path.start[:2]
        b = path.end[:2]
        ab = b - a
        leg = float(np.hypot(*ab))
        direction = ab / leg
        along = float((r_m[:2] - a) @ direction)
        along = min(leg, max(0.0, along + g.l1_distance))
        ref = a + along * direction
        to_ref = ref - r_m[:2]
        gs = float(np.hypot(*v_ground[:2]))
        dist = float(np.hypot(*to_ref))
        if gs < 1.0 or dist < 1e-9:
            return 0.0
        eta = math.atan2(
            v_ground[0] * to_ref[1] - v_ground[1] * to_ref[0],
            v_ground[0] * to_ref[0] + v_ground[1] * to_ref[1],
        )
        a_cmd = 2.0 * gs * gs * math.sin(eta) / g.l1_distance
        return _clip(math.atan(a_cmd / GRAVITY), g.max_bank)


def _clip(x: float, bound: float) -> float:
    return min(bound, max(-bound, x))
