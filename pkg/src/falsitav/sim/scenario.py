"""The built-in urban scenario: ego, six vehicles, two crosswalk pedestrians and a jaywalker.

Free parameters: colours and models of vehicles 1-5, the jaywalker's shirt
and pants colours and the presence of fog (13 discrete), plus the initial
ego position, the position of vehicle 1 and the jaywalker's walking speed
(3 continuous).
"""
from __future__ import annotations

from typing import Sequence

from ..trace import ContinuousParam, DiscreteParam, ParameterSpace, ParamValuation
from .config import COLORS, VEHICLE_MODELS, AgentConfig, EgoConfig, RoadConfig, ScenarioConfig, SpecParams

ROAD = RoadConfig()
RIGHT_PARKED_Y = -4.0
LEFT_PARKED_Y = 4.0
SIDEWALK_Y = 6.5

VEHICLES = ("v1", "v2", "v3", "v4", "v5")
CONTINUOUS_BINS = {"ego_position": 4, "v1_position": 4, "jw_speed": 4}


def urban_space() -> ParameterSpace:
    model_names = tuple(m.name for m in VEHICLE_MODELS)
    discrete = [DiscreteParam(f"color_{v}", COLORS) for v in VEHICLES]
    discrete += [DiscreteParam(f"model_{v}", model_names) for v in VEHICLES]
    discrete += [
        DiscreteParam("jw_shirt", COLORS),
        DiscreteParam("jw_pants", COLORS),
        DiscreteParam("fog", (False, True)),
    ]
    continuous = [
        ContinuousParam("ego_position", 0.0, 20.0),
        ContinuousParam("v1_position", 35.0, 65.0),
        ContinuousParam("jw_speed", 0.0, 2.5),
    ]
    return ParameterSpace(tuple(discrete), tuple(continuous))


def default_valuation(space: ParameterSpace | None = None) -> ParamValuation:
    """Level 0 for every discrete parameter, interval midpoints otherwise."""
    space = space or urban_space()
    return ParamValuation(
        {p.name: 0 for p in space.discrete},
        {p.name: 0.5 * (p.lower + p.upper) for p in space.continuous},
    )


def urban_scenario(p: ParamValuation, space: ParameterSpace | None = None) -> ScenarioConfig:
    space = space or urban_space()
    lv = lambda name: p.level(space, name)  # noqa: E731
    model = lambda v: p.discrete[f"model_{v}"]  # noqa: E731
    c = p.continuous

    def parked(name, x, y, color=None, mdl=None, kind="parked_vehicle"):
        return AgentConfig(
            name, kind, x, y,
            model=model(name) if mdl is None else mdl,
            color=lv(f"color_{name}") if color is None else color,
        )

    agents = (
        parked("v1", c["v1_position"], RIGHT_PARKED_Y),
        parked("v2", 150.0, ROAD.lane_center(1), kind="stopping_vehicle"),
        parked("v3", 75.0, LEFT_PARKED_Y),
        parked("v4", 100.0, RIGHT_PARKED_Y),
        parked("v5", 118.0, LEFT_PARKED_Y),
        parked("v6", 130.0, RIGHT_PARKED_Y, color="white", mdl=0),
        AgentConfig("p1", "crosswalk_pedestrian", 158.0, -SIDEWALK_Y, speed=1.0,
                    turn_lateral=SIDEWALK_Y, color="red", pants_color="blue"),
        AgentConfig("p2", "crosswalk_pedestrian", 159.5, SIDEWALK_Y, speed=1.2,
                    turn_lateral=-SIDEWALK_Y, color="green", pants_color="black"),
        AgentConfig("jw", "jaywalking_pedestrian", 109.0, -SIDEWALK_Y, speed=c["jw_speed"],
                    color=lv("jw_shirt"), pants_color=lv("jw_pants"),
                    turn_lateral=ROAD.lane_center(ROAD.lane_count - 1)),
    )
    ego = EgoConfig(init_longitudinal_position=c["ego_position"], init_speed=10.0, lane=1)
    return ScenarioConfig(ego=ego, agents=agents, fog=bool(lv("fog")), road=ROAD)


def no_collision_requirement(agent_names: Sequence[str], spec: SpecParams = SpecParams()) -> str:
    """Text of the requirement "a moving ego never hits anything".

    While ``v_ego`` exceeds the speed threshold, every agent must be either
    outside the front corridor or farther than the distance threshold, and
    never overlap the bumper.
    """
    near = [f"not (dist_{n} < {spec.eps_dist!r} and front_{n} > 0)" for n in agent_names]
    overlap = [f"not (dist_{n} < 0)" for n in agent_names]
    body = " and ".join(near + overlap)
    return f"always (v_ego > {spec.eps_speed!r} -> ({body}))"


def urban_requirement(spec: SpecParams = SpecParams()) -> str:
    names = [a.name for a in urban_scenario(default_valuation()).agents]
    return no_collision_requirement(names, spec)
