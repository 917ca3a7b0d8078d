"""Scalar costs on simulation outcomes: plain robustness or its magnitude."""
from __future__ import annotations

import math
from dataclasses import dataclass

from ..sim.config import SpecParams
from ..sim.engine import SimOutcome
from ..stl import Formula, parse_formula, robustness
from ..trace import Trace

MODES = ("falsify", "glancing")
BOOL_SATURATION = SpecParams().bool_saturation


def _trace_of(outcome: SimOutcome | Trace) -> Trace:
    return outcome.trace if isinstance(outcome, SimOutcome) else outcome


def capped_robustness(outcome: SimOutcome | Trace, spec: Formula, cap: float = BOOL_SATURATION) -> float:
    """Robustness at time 0, clipped into ``[-cap, cap]``."""
    trace = _trace_of(outcome)
    if len(trace) == 0:
        raise ValueError("empty trace")
    r = robustness(spec, trace, 0)
    return min(max(r, -cap), cap)


def glancing_objective(outcome: SimOutcome | Trace, spec: Formula, cap: float = BOOL_SATURATION) -> float:
    """Distance of the run from the satisfaction boundary."""
    return abs(capped_robustness(outcome, spec, cap))


@dataclass(frozen=True)
class Objective:
    """What to minimise: ``R`` itself (falsify) or ``|R|`` (glancing)."""

    spec: Formula
    mode: str = "glancing"
    cap: float = BOOL_SATURATION

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if isinstance(self.spec, str):
            object.__setattr__(self, "spec", parse_formula(self.spec))

    @property
    def halts_on_violation(self) -> bool:
        return self.mode == "falsify"

    def evaluate(self, outcome: SimOutcome | Trace) -> tuple[float, float]:
        """``(robustness, cost)`` of one run; both finite."""
        r = capped_robustness(outcome, self.spec, self.cap)
        cost = abs(r) if self.mode == "glancing" else r
        assert math.isfinite(cost)
        return r, cost
