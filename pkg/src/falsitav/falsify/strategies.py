"""Test-generation strategies: global uniform random, and covering array + UR/SA."""
from __future__ import annotations

import functools
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

import numpy as np

from ..covering import CoveringArray, generate, verify_coverage
from ..trace import ContinuousParam, ParameterSpace, ParamValuation
from .annealing import SAParams, simulated_annealing

STRATEGIES = ("ur", "ca-ur", "ca-sa")
DEFAULT_BINS = 4

# streams derived from the trial seed; distinct tags keep them independent
_TAG_UR, _TAG_PHASE2 = 1, 2


class BudgetError(ValueError):
    pass


@dataclass(frozen=True)
class Budget:
    total_sims: int = 200
    per_case_cap: int = 50
    trials: int = 20

    def __post_init__(self):
        if self.total_sims < 1 or self.per_case_cap < 1 or self.trials < 1:
            raise BudgetError("budget fields must be positive")
        if self.per_case_cap > self.total_sims:
            raise BudgetError("per_case_cap cannot exceed total_sims")


@dataclass(frozen=True)
class Evaluation:
    index: int
    valuation: ParamValuation
    robustness: float
    objective: float
    phase: int  # 0 = global sampling, 1 = covering array, 2 = continuation
    case: int  # CA row driving the continuation; -1 otherwise
    wall_ms: float = field(default=0.0, compare=False)


@dataclass(frozen=True)
class TrialResult:
    strategy: str
    seed: int
    evaluations: tuple[Evaluation, ...]
    ca_size: int = 0
    halted: bool = False

    @property
    def sims_used(self) -> int:
        return len(self.evaluations)

    @property
    def best(self) -> Evaluation:
        # first minimiser wins ties, so the result does not depend on float noise in order
        return min(self.evaluations, key=lambda e: (e.objective, e.index))

    @property
    def best_valuation(self) -> ParamValuation:
        return self.best.valuation

    @property
    def best_objective(self) -> float:
        return self.best.objective

    @property
    def best_robustness(self) -> float:
        return self.best.robustness

    @property
    def all_evaluations(self) -> list[tuple[ParamValuation, float]]:
        return [(e.valuation, e.robustness) for e in self.evaluations]

    def case_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for e in self.evaluations:
            if e.phase == 2:
                out[e.case] = out.get(e.case, 0) + 1
        return out


class _Halt(Exception):
    pass


class _Runner:
    """Counts simulations at the problem boundary and records each one."""

    def __init__(self, problem: Callable, limit: int):
        self.problem = problem
        self.limit = limit
        self.evals: list[Evaluation] = []
        self.halt = bool(getattr(problem, "halts_on_violation", False))
        self.halted = False

    @property
    def remaining(self) -> int:
        return self.limit - len(self.evals)

    def __call__(self, v: ParamValuation, phase: int, case: int = -1) -> float:
        if self.remaining <= 0:
            raise BudgetError("simulation budget exhausted")
        start = time.perf_counter()
        out = self.problem(v)
        rob, cost = out if isinstance(out, tuple) else (float(out), float(out))
        wall = (time.perf_counter() - start) * 1e3
        self.evals.append(Evaluation(len(self.evals), v, float(rob), float(cost), phase, case, wall))
        if self.halt and rob < 0:
            self.halted = True
            raise _Halt
        return float(cost)


class Problem:
    """Glue between a system under test and an objective."""

    def __init__(self, sut: Callable, objective):
        self.sut = sut
        self.objective = objective

    @property
    def halts_on_violation(self) -> bool:
        return self.objective.halts_on_violation

    def __call__(self, v: ParamValuation) -> tuple[float, float]:
        return self.objective.evaluate(self.sut(v))


def _sample_uniform(space: ParameterSpace, rng: np.random.Generator, discrete=None) -> ParamValuation:
    if discrete is None:
        discrete = {p.name: int(rng.integers(p.size)) for p in space.discrete}
    cont = {p.name: float(rng.uniform(p.lower, p.upper)) for p in space.continuous}
    return ParamValuation(discrete, cont)


def bin_centers(p: ContinuousParam, bins: int) -> list[float]:
    """Centres of ``bins`` equal-width bins over the parameter interval."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    return [p.lower + (k + 0.5) * p.width / bins for k in range(bins)]


def _rng(seed: int, tag: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), tag]))


def run_global_ur(space: ParameterSpace, problem: Callable, budget: Budget, seed: int = 0) -> TrialResult:
    """Uniform random sampling of the whole space; argmin over ``total_sims`` runs."""
    rng = _rng(seed, _TAG_UR)
    run = _Runner(problem, budget.total_sims)
    try:
        while run.remaining:
            run(_sample_uniform(space, rng), phase=0)
    except _Halt:
        pass
    return TrialResult("ur", seed, tuple(run.evals), halted=run.halted)


@functools.lru_cache(maxsize=64)
def _cached_ca(strength: int, domains: tuple[int, ...], seed: int) -> CoveringArray:
    return generate(strength, domains, seed=seed)


def covering_cases(
    space: ParameterSpace, strength: int = 2, bins: Mapping[str, int] | int | None = None, seed: int = 0,
) -> tuple[CoveringArray, list[ParamValuation]]:
    """Covering array over discrete levels and binned continuous values, as valuations.

    Parameters with a single level are held at it and left out of the array.
    The array is checked for full coverage before it is returned.
    """
    if bins is None or isinstance(bins, int):
        nb = DEFAULT_BINS if bins is None else bins
        bins = {p.name: nb for p in space.continuous}
    centers = {p.name: bin_centers(p, int(bins.get(p.name, DEFAULT_BINS))) for p in space.continuous}
    sizes = [(p.name, p.size, True) for p in space.discrete] + [
        (p.name, len(centers[p.name]), False) for p in space.continuous
    ]
    free = [s for s in sizes if s[1] > 1]
    if free:
        domains = tuple(s[1] for s in free)
        ca = _cached_ca(min(strength, len(domains)), domains, int(seed))
        missing = verify_coverage(ca)
        if missing:
            raise RuntimeError(f"covering array misses {len(missing)} combinations")
        rows = ca.rows
    else:
        ca = CoveringArray(1, (1,), ((0,),))
        rows = ((),)
    cases = []
    for row in rows:
        levels = {s[0]: 0 for s in sizes}
        levels.update({s[0]: lv for s, lv in zip(free, row)})
        cases.append(ParamValuation(
            {p.name: levels[p.name] for p in space.discrete},
            {p.name: centers[p.name][levels[p.name]] for p in space.continuous},
        ))
    return ca, cases


def _ranked(evals: list[Evaluation]) -> list[Evaluation]:
    return sorted(evals, key=lambda e: (e.objective, e.index))


def _run_ca(
    kind: str, space: ParameterSpace, problem: Callable, budget: Budget, strength: int,
    bins, sa_params: SAParams, seed: int,
) -> TrialResult:
    ca, cases = covering_cases(space, strength, bins, seed)
    if budget.total_sims < len(cases):
        raise BudgetError(f"budget {budget.total_sims} is smaller than the covering array ({len(cases)} rows)")
    run = _Runner(problem, budget.total_sims)
    rng = _rng(seed, _TAG_PHASE2)
    try:
        for i, case in enumerate(cases):
            run(case, phase=1, case=i)
        ranking = _ranked(run.evals)
        bounds = [(p.lower, p.upper) for p in space.continuous]
        for start in ranking:
            if not run.remaining:
                break
            n = min(budget.per_case_cap, run.remaining)
            disc = dict(start.valuation.discrete)
            if kind == "ca-ur" or not space.continuous:
                for _ in range(n):
                    run(_sample_uniform(space, rng, disc), phase=2, case=start.index)
                continue
            names = [p.name for p in space.continuous]

            def cost(x, disc=disc, case=start.index):
                return run(ParamValuation(disc, dict(zip(names, map(float, x)))), phase=2, case=case)

            x0 = [start.valuation.continuous[nm] for nm in names]
            params = sa_params if sa_params.schedule_length else replace(
                sa_params, schedule_length=budget.per_case_cap)
            simulated_annealing(x0, cost, n, bounds, params, rng, init_value=start.objective)
    except _Halt:
        pass
    return TrialResult(kind, seed, tuple(run.evals), ca_size=len(cases), halted=run.halted)


def run_ca_ur(space, problem, budget: Budget, ca_strength: int = 2, bins=None, seed: int = 0) -> TrialResult:
    """Covering-array screening, then uniform sampling of the continuous part of the best cases."""
    return _run_ca("ca-ur", space, problem, budget, ca_strength, bins, SAParams(), seed)


def run_ca_sa(space, problem, budget: Budget, ca_strength: int = 2, bins=None,
              sa_params: SAParams = SAParams(), seed: int = 0) -> TrialResult:
    """Covering-array screening, then annealing over the continuous part of the best cases."""
    return _run_ca("ca-sa", space, problem, budget, ca_strength, bins, sa_params, seed)


def run_strategy(name: str, space, problem, budget: Budget, seed: int, **kw) -> TrialResult:
    if name == "ur":
        return run_global_ur(space, problem, budget, seed)
    if name == "ca-ur":
        return run_ca_ur(space, problem, budget, seed=seed, **{k: v for k, v in kw.items() if k != "sa_params"})
    if name == "ca-sa":
        return run_ca_sa(space, problem, budget, seed=seed, **kw)
    raise ValueError(f"unknown strategy {name!r}; choose from {STRATEGIES}")
