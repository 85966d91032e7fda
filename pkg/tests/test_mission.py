"""Unit tests for waypoint sequencing and cross-track geometry."""

import math

import numpy as np
import pytest

from fwadapt.mission import (
    MissionComplete,
    MissionPlan,
    PathSegment,
    Waypoint,
    advance_mission,
    cross_track_error,
)


def wp(n, e, d=-100.0, radius=25.0):
    return Waypoint(position=[n, e, d], airspeed_s=15.0, acceptance_radius=radius)


def rectangle(loop=True):
    return MissionPlan([wp(0, 0), wp(400, 0), wp(400, 400), wp(0, 400)], loop=loop)


class TestTypes:
    def test_waypoint_validation(self):
        with pytest.raises(ValueError):
            Waypoint(position=[0, 0, 0], airspeed_s=0.0, acceptance_radius=10.0)
        with pytest.raises(ValueError):
            Waypoint(position=[0, 0, 0], airspeed_s=10.0, acceptance_radius=0.0)

    def test_plan_needs_two_waypoints(self):
        with pytest.raises(ValueError):
            MissionPlan([wp(0, 0)])

    def test_coincident_consecutive_rejected(self):
        with pytest.raises(ValueError):
            MissionPlan([wp(0, 0), wp(0, 0)])

    def test_degenerate_segment_rejected(self):
        with pytest.raises(ValueError):
            PathSegment([0, 0, -100], [0, 0, -50])  # no horizontal extent


class TestAdvanceMission:
    def test_far_from_target_holds_index(self):
        plan = rectangle()
        r_s, v_s, seg, idx = advance_mission(plan, np.array([0.0, 0.0, -100.0]), 1)
        assert idx == 1
        np.testing.assert_array_equal(r_s, [400, 0, -100])
        assert v_s == 15.0
        np.testing.assert_array_equal(seg.start, [0, 0, -100])

    def test_inside_radius_advances_once(self):
        plan = rectangle()
        _, _, seg, idx = advance_mission(plan, np.array([390.0, 0.0, -100.0]), 1)
        assert idx == 2
        np.testing.assert_array_equal(seg.start, [400, 0, -100])
        np.testing.assert_array_equal(seg.end, [400, 400, -100])

    def test_never_skips_even_when_inside_two_radii(self):
        plan = MissionPlan([wp(0, 0, radius=1000.0), wp(30, 0, radius=1000.0),
                            wp(60, 0, radius=1000.0)], loop=True)
        _, _, _, idx = advance_mission(plan, np.array([0.0, 0.0, -100.0]), 0)
        assert idx == 1

    def test_two_waypoint_loop_cycles(self):
        plan = MissionPlan([wp(0, 0), wp(200, 0)], loop=True)
        indices = []
        idx = 1
        for _ in range(4):
            target = plan.waypoints[idx].position
            _, _, _, idx = advance_mission(plan, target, idx)
            indices.append(idx)
        assert indices == [0, 1, 0, 1]

    def test_non_looping_mission_completes(self):
        plan = MissionPlan([wp(0, 0), wp(200, 0)], loop=False)
        with pytest.raises(MissionComplete):
            advance_mission(plan, np.array([200.0, 0.0, -100.0]), 1)

    def test_index_validation(self):
        with pytest.raises(ValueError):
            advance_mission(rectangle(), np.zeros(3), 7)


class TestCrossTrack:
    def test_zero_on_the_polyline(self):
        plan = rectangle()
        assert cross_track_error(np.array([200.0, 0.0, -100.0]), plan) == 0.0

    def test_perpendicular_distance(self):
        plan = MissionPlan([wp(0, 0), wp(100, 0)], loop=False)
        assert math.isclose(
            cross_track_error(np.array([50.0, 30.0, -100.0]), plan), 30.0
        )

    def test_endpoint_clamp(self):
        plan = MissionPlan([wp(0, 0), wp(100, 0)], loop=False)
        assert math.isclose(
            cross_track_error(np.array([110.0, 0.0, -100.0]), plan), 10.0
        )

    def test_loop_includes_closing_leg(self):
        # (5, 200) sits 5 m off the closing leg between (0,400) and (0,0)
        point = np.array([5.0, 200.0, -100.0])
        assert cross_track_error(point, rectangle(loop=True)) == 5.0
        assert cross_track_error(point, rectangle(loop=False)) == 200.0

    def test_nonnegative_everywhere(self):
        plan = rectangle()
        rng = np.random.default_rng(1)
        for _ in range(200):
            p = rng.uniform(-600, 1000, 3)
            assert cross_track_error(p, plan) >= 0.0

    def test_rigid_motion_invariance(self):
        rng = np.random.default_rng(9)
        base = [wp(0, 0), wp(400, 0), wp(400, 400)]
        plan = MissionPlan(base, loop=True)
        for _ in range(20):
            ang = float(rng.uniform(0, 2 * math.pi))
            shift = rng.uniform(-500, 500, 2)
            c, s = math.cos(ang), math.sin(ang)
            rot = np.array([[c, -s], [s, c]])

            def xf(p):
                q = np.asarray(p, dtype=float)
                return np.array([*(rot @ q[:2] + shift), q[2]])

            moved = MissionPlan(
                [Waypoint(xf(w.position), w.airspeed_s, w.acceptance_radius)
                 for w in base],
                loop=True,
            )
            point = rng.uniform(-300, 700, 3)
            d0 = cross_track_error(point, plan)
            d1 = cross_track_error(xf(point), moved)
            assert abs(d0 - d1) < 1e-9
