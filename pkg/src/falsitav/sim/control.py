"""Collision-avoidance controller and its object tracker."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .config import PEDESTRIAN_RADIUS, ControllerParams
from .perception import Detection

# size the controller assumes per detected class: (half length, half width)
ASSUMED_HALF_SIZE = {"vehicle": (2.25, 0.9), "pedestrian": (PEDESTRIAN_RADIUS, PEDESTRIAN_RADIUS)}


@dataclass(frozen=True)
class EgoState:
    x: float
    y: float
    heading: float
    speed: float
    lane_y: float = 0.0
    width: float = 1.8
    length: float = 4.5

    def bumper(self) -> tuple[float, float]:
        return (self.x + 0.5 * self.length * math.cos(self.heading),
                self.y + 0.5 * self.length * math.sin(self.heading))

    def to_world(self, rel_x: float, rel_y: float) -> tuple[float, float]:
        bx, by = self.bumper()
        c, s = math.cos(self.heading), math.sin(self.heading)
        return bx + c * rel_x - s * rel_y, by + s * rel_x + c * rel_y

    def to_local(self, wx: float, wy: float) -> tuple[float, float]:
        bx, by = self.bumper()
        c, s = math.cos(self.heading), math.sin(self.heading)
        dx, dy = wx - bx, wy - by
        return c * dx + s * dy, -s * dx + c * dy


@dataclass(frozen=True)
class Command:
    throttle: float
    brake: float
    steering: float


@dataclass
class Track:
    cls: str
    x: float  # world position at the last detection
    y: float
    t: float
    vx: float  # world velocity from the last two detections
    vy: float


@dataclass
class TrackerState:
    """Per-object tracks, differencing the last two detections.

    Detections are lifted into the world frame with the ego pose so that the
    ego's own rotation does not show up as object motion.
    """

    tracks: dict[str, Track] = field(default_factory=dict)

    def update(self, detections: Sequence[Detection], t: float, ego: EgoState, ttl: float) -> None:
        for det in detections:
            if not det.detected:
                continue
            wx, wy = ego.to_world(det.rel_x, det.rel_y)
            tr = self.tracks.get(det.id)
            if tr is not None and 0.0 < t - tr.t <= ttl:
                dt = t - tr.t
                self.tracks[det.id] = Track(det.cls, wx, wy, t, (wx - tr.x) / dt, (wy - tr.y) / dt)
            else:
                # first sighting: assume the object is at rest
                self.tracks[det.id] = Track(det.cls, wx, wy, t, 0.0, 0.0)
        for key in [k for k, tr in self.tracks.items() if t - tr.t > ttl]:
            del self.tracks[key]


def _lane_keep(ego: EgoState, p: ControllerParams) -> float:
    return -p.lane_gain * (ego.y - ego.lane_y) - p.heading_gain * ego.heading


def control(
    detections: Sequence[Detection],
    history: TrackerState,
    ego: EgoState,
    t: float,
    params: ControllerParams = ControllerParams(),
) -> Command:
    """Brake for predicted corridor intrusions, swerve when time-to-collision is short.

    Tracks are extrapolated at constant velocity over ``params.lookahead``
    while the ego is held at its current pose, so only the object's own
    motion can carry it into or out of the corridor.
    """
    history.update(detections, t, ego, params.track_ttl)
    corridor_half = 0.5 * ego.width + params.corridor_margin
    c, s = math.cos(ego.heading), math.sin(ego.heading)
    bx, by = ego.bumper()
    threat = None
    threat_gap = math.inf
    steps = 6
    taus = [params.lookahead * k / steps for k in range(steps + 1)]
    for tr in history.tracks.values():
        hl, hw = ASSUMED_HALF_SIZE.get(tr.cls, ASSUMED_HALF_SIZE["vehicle"])
        age = t - tr.t
        dx, dy = tr.x + tr.vx * age - bx, tr.y + tr.vy * age - by
        px, py = c * dx + s * dy, -s * dx + c * dy
        ux, uy = c * tr.vx + s * tr.vy, -s * tr.vx + c * tr.vy
        lateral = corridor_half + hw
        for tau in taus:
            qx, qy = px + ux * tau, py + uy * tau
            if abs(qy) <= lateral and qx + hl >= 0.0 and qx - hl <= params.d_brake:
                gap = max(px - hl, 0.0)
                if gap < threat_gap:
                    threat, threat_gap = (py, ego.speed - ux), gap
                break
    if threat is None:
        return Command(params.throttle, 0.0, _lane_keep(ego, params))
    py, closing = threat
    ttc = threat_gap / closing if closing > 0 else math.inf
    if ttc < params.ttc_steer:
        steer = -params.steer_magnitude if py >= 0 else params.steer_magnitude
        return Command(0.0, 1.0, steer)
    return Command(0.0, 1.0, _lane_keep(ego, params))
