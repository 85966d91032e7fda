"""Unit tests for the position controller stand-ins."""

import math

import numpy as np
import pytest

from fwadapt.mission import PathSegment
from fwadapt.position import PositionController, PositionGains

NORTH_PATH = PathSegment([0.0, 0.0, -100.0], [400.0, 0.0, -100.0])


def controller(pitch_trim=0.03, throttle_trim=0.25):
    return PositionController(PositionGains(), pitch_trim, throttle_trim, dt=0.02)


class TestLongitudinal:
    def test_equilibrium_outputs_trim(self):
        pc = controller()
        sp = pc.update(
            r_s=np.array([400.0, 0.0, -100.0]),
            v_airspeed_s=15.0,
            r_m=np.array([100.0, 0.0, -100.0]),
            v_true=15.0,
            v_ground=np.array([15.0, 0.0, 0.0]),
            path=NORTH_PATH,
        )
        assert sp.roll_s == 0.0
        assert math.isclose(sp.pitch_s, 0.03, rel_tol=1e-12)
        assert math.isclose(sp.thrust_s, 0.25, rel_tol=1e-12)

    def test_below_altitude_pitches_up_and_adds_thrust(self):
        pc = controller()
        sp = pc.update(
            r_s=np.array([400.0, 0.0, -100.0]),
            v_airspeed_s=15.0,
            r_m=np.array([100.0, 0.0, -90.0]),  # 10 m below setpoint
            v_true=15.0,
            v_ground=np.array([15.0, 0.0, 0.0]),
            path=NORTH_PATH,
        )
        assert sp.pitch_s > 0.03
        assert sp.thrust_s > 0.25

    def test_slow_airspeed_pitches_down(self):
        pc = controller()
        sp = pc.update(
            r_s=np.array([400.0, 0.0, -100.0]),
            v_airspeed_s=15.0,
            r_m=np.array([100.0, 0.0, -100.0]),
            v_true=12.0,
            v_ground=np.array([12.0, 0.0, 0.0]),
            path=NORTH_PATH,
        )
        assert sp.pitch_s < 0.03
        assert sp.thrust_s > 0.25

    def test_setpoint_limits(self):
        pc = controller()
        sp = pc.update(
            r_s=np.array([400.0, 0.0, -1000.0]),
            v_airspeed_s=15.0,
            r_m=np.array([100.0, 0.0, -100.0]),
            v_true=15.0,
            v_ground=np.array([15.0, 0.0, 0.0]),
            path=NORTH_PATH,
        )
        assert sp.pitch_s <= math.radians(30.0)
        assert sp.thrust_s <= 1.0

    def test_v_true_must_be_positive(self):
        with pytest.raises(ValueError):
            controller().update(
                r_s=np.zeros(3), v_airspeed_s=15.0, r_m=np.zeros(3),
                v_true=0.0, v_ground=np.zeros(3), path=NORTH_PATH,
            )


class TestLateral:
    def test_left_offset_banks_right(self):
        pc = controller()
        sp = pc.update(
            r_s=np.array([400.0, 0.0, -100.0]),
            v_airspeed_s=15.0,
            r_m=np.array([100.0, -20.0, -100.0]),  # 20 m left (west) of the path
            v_true=15.0,
            v_ground=np.array([15.0, 0.0, 0.0]),
            path=NORTH_PATH,
        )
        assert sp.roll_s > 0.0

    def test_right_offset_banks_left(self):
        pc = controller()
        sp = pc.update(
            r_s=np.array([400.0, 0.0, -100.0]),
            v_airspeed_s=15.0,
            r_m=np.array([100.0, 20.0, -100.0]),
            v_true=15.0,
            v_ground=np.array([15.0, 0.0, 0.0]),
            path=NORTH_PATH,
        )
        assert sp.roll_s < 0.0

    def test_bank_limited(self):
        pc = controller()
        sp = pc.update(
            r_s=np.array([400.0, 0.0, -100.0]),
            v_airspeed_s=15.0,
            r_m=np.array([100.0, -300.0, -100.0]),
            v_true=25.0,
            v_ground=np.array([25.0, 0.0, 0.0]),
            path=NORTH_PATH,
        )
        assert abs(sp.roll_s) <= math.radians(45.0)

    def test_slow_ground_speed_levels_wings(self):
        pc = controller()
        sp = pc.update(
            r_s=np.array([400.0, 0.0, -100.0]),
            v_airspeed_s=15.0,
            r_m=np.array([100.0, -20.0, -100.0]),
            v_true=15.0,
            v_ground=np.array([0.5, 0.0, 0.0]),
            path=NORTH_PATH,
        )
        assert sp.roll_s == 0.0
