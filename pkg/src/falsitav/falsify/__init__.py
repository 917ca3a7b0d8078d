"""Search strategies that drive a system under test towards boundary cases."""
from .annealing import SAParams, reflect, simulated_annealing
from .objective import Objective, capped_robustness, glancing_objective
from .strategies import (
    STRATEGIES,
    Budget,
    BudgetError,
    Evaluation,
    Problem,
    TrialResult,
    bin_centers,
    covering_cases,
    run_ca_sa,
    run_ca_ur,
    run_global_ur,
    run_strategy,
)
from .sut import ExternalSUT, ScenarioSUT, SUTError

__all__ = [
    "SAParams", "reflect", "simulated_annealing", "Objective", "capped_robustness",
    "glancing_objective", "STRATEGIES", "Budget", "BudgetError", "Evaluation", "Problem",
    "TrialResult", "bin_centers", "covering_cases", "run_ca_sa", "run_ca_ur", "run_global_ur",
    "run_strategy", "ExternalSUT", "ScenarioSUT", "SUTError",
]
