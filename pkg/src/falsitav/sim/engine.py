"""Closed-loop simulation: scene -> perceive -> control -> integrate.

Agents follow scripted trajectories that do not react to the ego, so their
poses are computed for the whole horizon up front. The spec signals (bumper
distance and front-corridor flag per agent) are extracted after the loop in
one vectorised pass; the trace is then cut at the first penetrating sample,
which is where the run would have halted.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..trace import Trace
from .config import (
    PEDESTRIAN_RADIUS,
    VEHICLE_MODELS,
    AgentConfig,
    ConfigError,
    PerceptionParams,
    ScenarioConfig,
    SimSettings,
    SpecParams,
)
from .control import Command, EgoState, TrackerState, control
from .dynamics import bicycle_step
from .geometry import bumper_distance, bumper_segment, in_corridor
from .perception import Detection, detect

MAX_DT = 0.1
MAX_HORIZON = 120.0


@dataclass(frozen=True)
class SimOutcome:
    trace: Trace
    collision: bool
    collision_speed: float
    steps: int
    collided_with: str | None = None


@dataclass(frozen=True)
class AgentTracks:
    """Per-sample agent poses and shapes; arrays are (samples, agents)."""

    names: tuple[str, ...]
    x: np.ndarray
    y: np.ndarray
    heading: np.ndarray
    half_len: np.ndarray
    half_wid: np.ndarray
    radius: np.ndarray
    is_disc: np.ndarray


def _pedestrian_lateral(a: AgentConfig, t: np.ndarray, periodic: bool) -> np.ndarray:
    span = a.turn_lateral - a.lateral
    dist = abs(span)
    if a.speed == 0 or dist == 0:
        return np.full_like(t, a.lateral)
    direction = np.sign(span)
    s = a.speed * t
    if periodic:
        phase = np.mod(s, 2 * dist)
        travelled = np.where(phase <= dist, phase, 2 * dist - phase)
    else:
        travelled = np.where(s <= dist, s, np.where(s <= 2 * dist, 2 * dist - s, 0.0))
    return a.lateral + direction * travelled


def agent_tracks(cfg: ScenarioConfig, times: np.ndarray) -> AgentTracks:
    n, m = len(times), len(cfg.agents)
    xs = np.zeros((n, m))
    ys = np.zeros((n, m))
    hl = np.zeros(m)
    hw = np.zeros(m)
    rad = np.zeros(m)
    disc = np.zeros(m, dtype=bool)
    for j, a in enumerate(cfg.agents):
        xs[:, j] = a.longitudinal_position
        if a.kind in ("crosswalk_pedestrian", "jaywalking_pedestrian"):
            ys[:, j] = _pedestrian_lateral(a, times, periodic=a.kind == "crosswalk_pedestrian")
            rad[j] = PEDESTRIAN_RADIUS
            disc[j] = True
        else:
            ys[:, j] = a.lateral
            model = VEHICLE_MODELS[a.model]
            hl[j], hw[j] = model.length / 2, model.width / 2
    return AgentTracks(
        tuple(a.name for a in cfg.agents), xs, ys, np.zeros((n, m)),
        np.broadcast_to(hl, (n, m)), np.broadcast_to(hw, (n, m)),
        np.broadcast_to(rad, (n, m)), np.broadcast_to(disc, (n, m)),
    )


def extract_spec_signals(
    ego_x, ego_y, ego_heading, v_ego, agents: AgentTracks, ego_length: float, ego_width: float,
    spec: SpecParams = SpecParams(),
) -> dict[str, np.ndarray]:
    """v_ego plus ``dist_<agent>`` and ``front_<agent>`` for every sample.

    ``front`` is stored as +/- ``spec.bool_saturation`` so that a ``>= 0``
    predicate on it has a saturated margin.
    """
    ex, ey, eh = (np.asarray(a, dtype=float)[:, None] for a in (ego_x, ego_y, ego_heading))
    bumper = bumper_segment(ex, ey, eh, ego_length, ego_width)
    dist = bumper_distance(bumper, agents.x, agents.y, agents.heading,
                           agents.half_len, agents.half_wid, agents.radius, agents.is_disc)
    front = in_corridor(ex, ey, eh, ego_length, spec.corridor_length, 0.5 * ego_width + spec.corridor_margin,
                        agents.x, agents.y, agents.heading, agents.half_len, agents.half_wid,
                        agents.radius, agents.is_disc)
    out = {"v_ego": np.asarray(v_ego, dtype=float)}
    b = spec.bool_saturation
    for j, name in enumerate(agents.names):
        out[f"dist_{name}"] = dist[:, j]
        out[f"front_{name}"] = np.where(front[:, j], b, -b)
    return out


def check_inputs(cfg: ScenarioConfig, dt: float, horizon: float) -> None:
    errs = cfg.validate()
    if not 0 < dt <= MAX_DT:
        errs.append(f"dt must be in (0, {MAX_DT}], got {dt}")
    if not 0 < horizon <= MAX_HORIZON:
        errs.append(f"horizon must be in (0, {MAX_HORIZON}], got {horizon}")
    if errs:
        raise ConfigError("; ".join(errs))


def simulate(
    cfg: ScenarioConfig,
    pp: PerceptionParams = PerceptionParams(),
    dt: float | None = None,
    horizon: float | None = None,
    seed: int = 0,
    settings: SimSettings = SimSettings(),
) -> SimOutcome:
    dt = settings.dt if dt is None else dt
    horizon = settings.horizon if horizon is None else horizon
    check_inputs(cfg, dt, horizon)
    steps = int(round(horizon / dt))
    times = np.arange(steps + 1) * dt
    agents = agent_tracks(cfg, times)
    miss = [pp.miss_probability(a, cfg.fog) for a in cfg.agents]
    classes = ["pedestrian" if d else "vehicle" for d in agents.is_disc[0]] if cfg.agents else []
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), int(pp.seed_stream)]))
    m = len(cfg.agents)
    # one uniform and one normal pair per object per frame, drawn up front
    draws_u = rng.random((steps + 1, m))
    draws_n = rng.standard_normal((steps + 1, m, 2))
    miss = np.array(miss, dtype=float)

    veh, ctl = settings.vehicle, settings.controller
    ego_cfg = cfg.ego
    lane_y = cfg.road.lane_center(ego_cfg.lane)
    x, y, h, v = ego_cfg.init_longitudinal_position, lane_y, 0.0, ego_cfg.init_speed
    tracker = TrackerState()
    n = steps + 1
    state = np.zeros((n, 4))
    cmds = np.zeros((n, 3))
    half_len = 0.5 * ego_cfg.length
    for k in range(n):
        state[k] = (x, y, h, v)
        # ground truth relative to the bumper centre, ego frame
        c, s = np.cos(h), np.sin(h)
        bx, by = x + half_len * c, y + half_len * s
        dx = agents.x[k] - bx
        dy = agents.y[k] - by
        rel_x = c * dx + s * dy
        rel_y = -s * dx + c * dy
        hit, det_x, det_y = detect(rel_x, rel_y, miss, draws_u[k], draws_n[k], pp)
        dets = [
            Detection(agents.names[j], classes[j], float(det_x[j]), float(det_y[j]), True)
            for j in np.flatnonzero(hit)
        ]
        cmd: Command = control(dets, tracker, EgoState(x, y, h, v, lane_y, ego_cfg.width, ego_cfg.length), float(times[k]), ctl)
        cmds[k] = (cmd.throttle, cmd.brake, cmd.steering)
        if k < n - 1:
            x, y, h, v = bicycle_step(x, y, h, v, cmd.throttle, cmd.brake, cmd.steering, dt, veh)

    sig = extract_spec_signals(state[:, 0], state[:, 1], state[:, 2], state[:, 3], agents,
                               ego_cfg.length, ego_cfg.width, settings.spec)
    cols: dict[str, np.ndarray] = {
        "v_ego": sig.pop("v_ego"),
        "ego_x": state[:, 0],
        "ego_y": state[:, 1],
        "ego_heading": state[:, 2],
        "throttle": cmds[:, 0],
        "brake": cmds[:, 1],
        "steering": cmds[:, 2],
    }
    cols.update(sig)
    for j, name in enumerate(agents.names):
        cols[f"{name}_x"] = agents.x[:, j]
        cols[f"{name}_y"] = agents.y[:, j]

    collision, speed, hit, end = False, 0.0, None, n
    if agents.names:
        dist = np.column_stack([cols[f"dist_{nm}"] for nm in agents.names])
        bad = np.flatnonzero((dist < 0).any(axis=1))
        if len(bad):
            end = int(bad[0]) + 1
            collision = True
            speed = float(state[bad[0], 3])
            hit = agents.names[int(np.argmin(dist[bad[0]]))]
    trace = Trace(times[:end], {k: v[:end] for k, v in cols.items()})
    return SimOutcome(trace, collision, speed, end - 1, hit)


def simulate_json(scenario: Mapping, perception: Mapping | None = None, **kw) -> SimOutcome:
    return simulate(ScenarioConfig.from_json(scenario), PerceptionParams.from_json(perception or {}), **kw)
