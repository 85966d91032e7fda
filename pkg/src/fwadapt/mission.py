"""Waypoint missions: target sequencing and cross-track geometry.

Positions are north-east-down in a flat local frame; waypoint acceptance
and cross-track distance are evaluated in the horizontal plane only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Waypoint:
    position: np.ndarray  # (3,) north, east, down [m]
    airspeed_s: float  # commanded airspeed on the leg into this point [m/s]
    acceptance_radius: float  # horizontal switch distance [m]

    def __post_init__(self):
        object.__setattr__(
            self, "position", np.asarray(self.position, dtype=float).reshape(3)
        )
        if self.airspeed_s <= 0.0:
            raise ValueError("waypoint airspeed must be positive")
        if self.acceptance_radius <= 0.0:
            raise ValueError("waypoint acceptance radius must be positive")


@dataclass(frozen=True)
class PathSegment:
    """The active leg between the previous and current target waypoints."""

    start: np.ndarray
    end: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "start", np.asarray(self.start, dtype=float).reshape(3))
        object.__setattr__(self, "end", np.asarray(self.end, dtype=float).reshape(3))
        if self.horizontal_length() == 0.0:
            raise ValueError("degenerate path segment: coincident endpoints")

    def horizontal_length(self) -> float:
        d = self.end[:2] - self.start[:2]
        return float(math.hypot(d[0], d[1]))


class MissionPlan:
    """Ordered waypoint list, optionally repeating after the last point.

    Treated as immutable after construction; the horizontal leg table is
    precomputed for the per-tick cross-track evaluation.
    """

    def __init__(self, waypoints: list[Waypoint], loop: bool = True):
        if len(waypoints) < 2:
            raise ValueError("a mission needs at least 2 waypoints")
        for a, b in zip(waypoints, waypoints[1:]):
            if np.array_equal(a.position, b.position):
                raise ValueError("consecutive waypoints are coincident")
        self.waypoints = list(waypoints)
        self.loop = loop
        pairs = list(zip(self.waypoints, self.waypoints[1:]))
        if loop:
            pairs.append((self.waypoints[-1], self.waypoints[0]))
        # (ax, ay, dx, dy, |d|^2) per leg, horizontal plane
        self._leg_table = []
        for a, b in pairs:
            ax, ay = float(a.position[0]), float(a.position[1])
            dx = float(b.position[0]) - ax
            dy = float(b.position[1]) - ay
            self._leg_table.append((ax, ay, dx, dy, dx * dx + dy * dy))

    def __len__(self) -> int:
        return len(self.waypoints)

    def segment_to(self, index: int) -> PathSegment:
        """Leg ending at waypoint ``index``, starting at the previous one."""
        prev = (index - 1) % len(self.waypoints)
        return PathSegment(self.waypoints[prev].position, self.waypoints[index].position)

    def legs(self) -> list[PathSegment]:
        segs = [
            PathSegment(a.position, b.position)
            for a, b in zip(self.waypoints, self.waypoints[1:])
        ]
        if self.loop:
            segs.append(PathSegment(self.waypoints[-1].position, self.waypoints[0].position))
        return segs


class MissionComplete(Exception):
    """Terminal signal: a non-looping mission has exhausted its waypoints."""


def advance_mission(
    plan: MissionPlan, r_m: np.ndarray, active_index: int
) -> tuple[np.ndarray, float, PathSegment, int]:
    """Return the current target and leg, switching when inside acceptance.

    At most one waypoint is consumed per call.  Raises ``MissionComplete``
    when a non-looping plan has no waypoint left to target.
    """
    n = len(plan)
    if not 0 <= active_index < n:
        raise ValueError(f"active_index {active_index} out of range for {n} waypoints")
    r_m = np.asarray(r_m, dtype=float).reshape(3)
    target = plan.waypoints[active_index]
    dist = math.hypot(
        r_m[0] - target.position[0], r_m[1] - target.position[1]
    )
    if dist <= target.acceptance_radius:
        if active_index + 1 >= n and not plan.loop:
            raise MissionComplete
        active_index = (active_index + 1) % n
        target = plan.waypoints[active_index]
    return (
        target.position.copy(),
        target.airspeed_s,
        plan.segment_to(active_index),
        active_index,
    )


def _point_segment_distance_2d(p, a, b) -> float:
    """Horizontal distance from p to segment a-b, clamped to the endpoints."""
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0.0 else float((p - a) @ ab) / denom
    t = min(1.0, max(0.0, t))
    closest = a + t * ab
    return float(np.hypot(*(p - closest)))


def cross_track_error(r_m: np.ndarray, plan: MissionPlan) -> float:
    """Minimum horizontal distance from the position to the mission polyline."""
    px, py = float(r_m[0]), float(r_m[1])
    best = math.inf
    for ax, ay, dx, dy, dd in plan._leg_table:
        t = ((px - ax) * dx + (py - ay) * dy) / dd
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        ex = px - (ax + t * dx)
        ey = py - (ay + t * dy)
        d = ex * ex + ey * ey
        if d < best:
            best = d
    return math.sqrt(best)
