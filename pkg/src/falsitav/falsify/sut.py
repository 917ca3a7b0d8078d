"""Systems under test: map a parameter valuation to a trace."""
from __future__ import annotations

import io
import json
import subprocess
from dataclasses import dataclass, field
from typing import Callable, Sequence

from ..sim.config import PerceptionParams, ScenarioConfig, SimSettings
from ..sim.engine import SimOutcome, simulate
from ..sim.scenario import urban_scenario
from ..trace import ParameterSpace, ParamValuation, Trace, read_trace_csv


class SUTError(RuntimeError):
    pass


@dataclass(frozen=True)
class ScenarioSUT:
    """In-process closed-loop simulator.

    The perception seed is fixed for the whole search so that the cost is a
    deterministic function of the parameters alone.
    """

    space: ParameterSpace
    builder: Callable[[ParamValuation, ParameterSpace], ScenarioConfig] = urban_scenario
    perception: PerceptionParams = PerceptionParams()
    settings: SimSettings = SimSettings()
    seed: int = 0

    def __call__(self, valuation: ParamValuation) -> SimOutcome:
        return simulate(self.builder(valuation, self.space), self.perception, seed=self.seed,
                        settings=self.settings)


@dataclass(frozen=True)
class ExternalSUT:
    """Runs ``command`` once per valuation.

    The valuation goes to stdin as JSON (``{"discrete": ..., "continuous": ...}``);
    the process must print a trace CSV on stdout.
    """

    command: Sequence[str]
    timeout: float = 600.0
    env: dict | None = field(default=None, compare=False)

    def __call__(self, valuation: ParamValuation) -> Trace:
        try:
            proc = subprocess.run(
                list(self.command), input=json.dumps(valuation.to_json()), capture_output=True,
                text=True, timeout=self.timeout, env=self.env, check=False,
            )
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise SUTError(f"external simulator failed to run: {exc}") from exc
        if proc.returncode != 0:
            raise SUTError(f"external simulator exited with {proc.returncode}: {proc.stderr.strip()[:500]}")
        return read_trace_csv(io.StringIO(proc.stdout))
