"""Desk-scale closed-loop driving simulator and the ODE benchmark."""
from .config import (
    AgentConfig,
    ConfigError,
    ControllerParams,
    EgoConfig,
    PerceptionParams,
    RoadConfig,
    ScenarioConfig,
    SimSettings,
    SpecParams,
    VehicleParams,
)
from .control import Command, EgoState, TrackerState, control
from .engine import SimOutcome, extract_spec_signals, simulate
from .perception import Detection, SceneObject, perceive
from .ode import box_avoidance_formula, enters_box, ode_landscape, simulate_ode_example
from .scenario import default_valuation, urban_requirement, urban_scenario, urban_space
