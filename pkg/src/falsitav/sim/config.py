"""Scenario, perception, controller and vehicle configuration."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Mapping

COLORS = ("red", "green", "blue", "white", "black")
# brightness in [0, 1] used by the contrast model
COLOR_BRIGHTNESS = {"red": 0.35, "green": 0.45, "blue": 0.25, "white": 0.95, "black": 0.05}
BACKGROUND_BRIGHTNESS = {"road-dark": 0.2, "fog-bright": 0.85}

AGENT_KINDS = ("parked_vehicle", "stopping_vehicle", "crosswalk_pedestrian", "jaywalking_pedestrian")


@dataclass(frozen=True)
class VehicleModel:
    name: str
    length: float
    width: float
    miss_multiplier: float


VEHICLE_MODELS = (
    VehicleModel("sedan", 4.5, 1.8, 1.0),
    VehicleModel("hatchback", 3.9, 1.7, 1.15),
    VehicleModel("suv", 4.8, 2.0, 0.85),
    VehicleModel("van", 5.2, 2.0, 0.8),
    VehicleModel("roadster", 4.2, 1.75, 1.3),
)

PEDESTRIAN_RADIUS = 0.3


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RoadConfig:
    lane_count: int = 3
    lane_width: float = 3.5
    sidewalk_width: float = 2.5
    length: float = 250.0
    crosswalk_position: float = 158.0

    def lane_center(self, lane: int) -> float:
        """Lateral position of ``lane``; lane 0 is the rightmost, y grows to the left."""
        return (lane - (self.lane_count - 1) / 2) * self.lane_width

    @property
    def half_extent(self) -> float:
        return self.lane_count * self.lane_width / 2 + self.sidewalk_width


@dataclass(frozen=True)
class EgoConfig:
    init_longitudinal_position: float = 10.0
    init_speed: float = 10.0
    lane: int = 1
    length: float = 4.5
    width: float = 1.8


@dataclass(frozen=True)
class AgentConfig:
    """One environment actor.

    Vehicles use ``model`` and ``color``; the jaywalker uses ``color`` for
    the shirt and ``pants_color`` for the pants. ``lateral`` is the world y
    position (pedestrians: starting y), ``speed`` the walking speed. Crosswalk
    and jaywalking pedestrians turn around at ``turn_lateral``.
    """

    name: str
    kind: str
    longitudinal_position: float
    lateral: float
    model: int = 0
    color: str = "white"
    pants_color: str = "black"
    speed: float = 0.0
    turn_lateral: float = 0.0


@dataclass(frozen=True)
class ScenarioConfig:
    ego: EgoConfig = field(default_factory=EgoConfig)
    agents: tuple[AgentConfig, ...] = ()
    fog: bool = False
    road: RoadConfig = field(default_factory=RoadConfig)

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))

    def validate(self) -> list[str]:
        errs = []
        r = self.road
        if r.lane_count < 1 or r.lane_width <= 0:
            errs.append("road needs lane_count >= 1 and lane_width > 0")
        if not 0 <= self.ego.lane < r.lane_count:
            errs.append(f"ego lane {self.ego.lane} outside 0..{r.lane_count - 1}")
        if not 0 <= self.ego.init_longitudinal_position <= r.length:
            errs.append("ego position outside road extent")
        if self.ego.init_speed < 0:
            errs.append("ego speed must be >= 0")
        names = [a.name for a in self.agents]
        if len(set(names)) != len(names):
            errs.append("agent names must be unique")
        for a in self.agents:
            where = f"agent {a.name!r}"
            if a.kind not in AGENT_KINDS:
                errs.append(f"{where}: unknown kind {a.kind!r}")
            if not 0 <= a.model < len(VEHICLE_MODELS):
                errs.append(f"{where}: model index {a.model} outside 0..{len(VEHICLE_MODELS) - 1}")
            for c in (a.color, a.pants_color):
                if c not in COLORS:
                    errs.append(f"{where}: unknown color {c!r}")
            if not 0 <= a.longitudinal_position <= r.length:
                errs.append(f"{where}: longitudinal position outside road extent")
            for y in (a.lateral, a.turn_lateral):
                if abs(y) > r.half_extent:
                    errs.append(f"{where}: lateral position {y} outside road extent")
            if a.speed < 0:
                errs.append(f"{where}: speed must be >= 0")
        return errs

    def to_json(self) -> dict:
        d = asdict(self)
        d["agents"] = [asdict(a) for a in self.agents]
        return d

    @classmethod
    def from_json(cls, obj: Mapping) -> "ScenarioConfig":
        return cls(
            ego=_build(EgoConfig, obj.get("ego", {})),
            agents=tuple(_build(AgentConfig, a) for a in obj.get("agents", [])),
            fog=bool(obj.get("fog", False)),
            road=_build(RoadConfig, obj.get("road", {})),
        )


def _build(cls, obj: Mapping):
    known = {f.name for f in fields(cls)}
    extra = set(obj) - known
    if extra:
        raise ConfigError(f"unknown {cls.__name__} fields: {sorted(extra)}")
    return cls(**obj)


@dataclass(frozen=True)
class PerceptionParams:
    base_miss_rate: float = 0.2
    fog_miss_multiplier: float = 2.0
    contrast_gain: float = 1.5
    max_detection_range: float = 60.0
    position_noise_std: float = 0.01
    max_miss_probability: float = 0.95
    seed_stream: int = 0
    # when set, every object is missed with exactly this probability
    uniform_miss: float | None = None

    def contrast_multiplier(self, color: str, fog: bool) -> float:
        bg = BACKGROUND_BRIGHTNESS["fog-bright" if fog else "road-dark"]
        return 1.0 + self.contrast_gain * (1.0 - abs(COLOR_BRIGHTNESS[color] - bg))

    def miss_probability(self, agent: AgentConfig, fog: bool) -> float:
        if self.uniform_miss is not None:
            return min(max(self.uniform_miss, 0.0), 1.0)
        m = self.base_miss_rate
        if fog:
            m *= self.fog_miss_multiplier
        if agent.kind == "jaywalking_pedestrian":
            m *= 0.5 * (self.contrast_multiplier(agent.color, fog) + self.contrast_multiplier(agent.pants_color, fog))
        else:
            m *= self.contrast_multiplier(agent.color, fog)
        if agent.kind in ("parked_vehicle", "stopping_vehicle"):
            m *= VEHICLE_MODELS[agent.model].miss_multiplier
        return min(max(m, 0.0), self.max_miss_probability)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: Mapping) -> "PerceptionParams":
        return _build(cls, obj)


@dataclass(frozen=True)
class ControllerParams:
    throttle: float = 0.65
    d_brake: float = 15.0
    ttc_steer: float = 1.0
    lookahead: float = 1.5
    steer_magnitude: float = 0.15
    track_ttl: float = 0.25
    corridor_margin: float = 0.3
    lane_gain: float = 0.1
    heading_gain: float = 1.0


@dataclass(frozen=True)
class VehicleParams:
    wheelbase: float = 2.8
    max_decel: float = 8.0
    throttle_accel: float = 4.0
    drag: float = 0.2
    speed_cap: float = 20.0
    max_steer: float = 0.5


@dataclass(frozen=True)
class SpecParams:
    eps_speed: float = 0.5
    eps_dist: float = 0.5
    corridor_length: float = 30.0
    corridor_margin: float = 0.3
    bool_saturation: float = 1e4


@dataclass(frozen=True)
class SimSettings:
    """Everything besides the scenario and perception that shapes one run."""

    dt: float = 0.05
    horizon: float = 30.0
    controller: ControllerParams = field(default_factory=ControllerParams)
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    spec: SpecParams = field(default_factory=SpecParams)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: Mapping) -> "SimSettings":
        obj = dict(obj)
        out = cls(
            dt=float(obj.pop("dt", 0.05)),
            horizon=float(obj.pop("horizon", 30.0)),
            controller=_build(ControllerParams, obj.pop("controller", {})),
            vehicle=_build(VehicleParams, obj.pop("vehicle", {})),
            spec=_build(SpecParams, obj.pop("spec", {})),
        )
        if obj:
            raise ConfigError(f"unknown SimSettings fields: {sorted(obj)}")
        return out


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


__all__ = [
    "AGENT_KINDS", "COLORS", "VEHICLE_MODELS", "PEDESTRIAN_RADIUS", "AgentConfig", "ConfigError",
    "ControllerParams", "EgoConfig", "PerceptionParams", "RoadConfig", "ScenarioConfig",
    "SimSettings", "SpecParams", "VehicleModel", "VehicleParams", "load_json", "replace",
]
