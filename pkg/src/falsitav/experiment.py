"""Experiment orchestration: strategy x trial grids, CSV artifacts and summary fits."""
from __future__ import annotations

import csv
import json
import logging
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, NamedTuple, Sequence

import jsonschema
import numpy as np
from scipy import optimize, special

from .falsify import (
    STRATEGIES,
    Budget,
    ExternalSUT,
    Objective,
    Problem,
    SAParams,
    ScenarioSUT,
    TrialResult,
    run_strategy,
)
from .sim.config import AgentConfig, ConfigError, EgoConfig, PerceptionParams, ScenarioConfig, SimSettings
from .sim.scenario import urban_requirement, urban_scenario, urban_space
from .stl import parse_formula
from .trace import ParameterSpace, ParamValuation

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 2


class ExperimentConfigError(ValueError):
    pass


_POSITIVE_INT = {"type": "integer", "minimum": 1}

CONFIG_SCHEMA: dict = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "mode": {"enum": ["glancing", "falsify"]},
        "strategies": {"type": "array", "items": {"enum": list(STRATEGIES)}, "minItems": 1, "uniqueItems": True},
        "budget": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"total_sims": _POSITIVE_INT, "per_case_cap": _POSITIVE_INT, "trials": _POSITIVE_INT},
        },
        "seed": {"type": "integer", "minimum": 0},
        "ca_strength": _POSITIVE_INT,
        "bins": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 1}},
        "sa": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "t0": {"type": "number", "minimum": 0},
                "t_final": {"type": "number", "exclusiveMinimum": 0},
                "step_fraction": {"type": "number", "minimum": 0},
                "schedule_length": {"type": ["integer", "null"], "minimum": 1},
                "relative": {"type": "boolean"},
            },
        },
        "scenario": {"oneOf": [{"const": "urban"}, {"type": "string"}, {"type": "object"}]},
        "space": {"oneOf": [{"type": "string"}, {"type": "object"}]},
        "spec": {"type": "string", "minLength": 1},
        "perception": {"oneOf": [{"type": "string"}, {"type": "object"}]},
        "settings": {"oneOf": [{"type": "string"}, {"type": "object"}]},
        "sim_seed": {"type": "integer", "minimum": 0},
        "sut_exec": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "histogram_bins": _POSITIVE_INT,
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str = "glancing"
    strategies: tuple[str, ...] = STRATEGIES
    budget: Budget = Budget()
    seed: int = 0
    ca_strength: int = 2
    bins: Mapping[str, int] | None = None
    sa: SAParams = SAParams()
    scenario: Any = "urban"
    space: ParameterSpace | None = None
    spec: str | None = None
    perception: PerceptionParams = PerceptionParams()
    settings: SimSettings = SimSettings()
    sim_seed: int = 0
    sut_exec: tuple[str, ...] | None = None
    histogram_bins: int = 20

    def resolved_space(self) -> ParameterSpace:
        if self.space is not None:
            return self.space
        if self.scenario == "urban":
            return urban_space()
        raise ExperimentConfigError("space: required unless scenario is 'urban'")

    def resolved_spec(self) -> str:
        if self.spec is not None:
            return self.spec
        if self.scenario == "urban":
            return urban_requirement(self.settings.spec)
        raise ExperimentConfigError("spec: required unless scenario is 'urban'")


def _load_maybe(value, base: Path):
    """Inline JSON object, or a path (relative to the config file) to one."""
    if isinstance(value, str):
        with open(base / value) as fh:
            return json.load(fh)
    return value


def validate_config(obj: Any) -> None:
    """Schema check; the message names the offending JSON path."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(obj), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ExperimentConfigError(f"{err.json_path}: {err.message}")


def parse_config(obj: Mapping, base_dir: str | Path = ".") -> ExperimentConfig:
    validate_config(obj)
    base = Path(base_dir)
    kw: dict[str, Any] = {}
    for key in ("mode", "seed", "ca_strength", "sim_seed", "histogram_bins"):
        if key in obj:
            kw[key] = obj[key]
    if "strategies" in obj:
        kw["strategies"] = tuple(obj["strategies"])
    try:
        if "budget" in obj:
            kw["budget"] = Budget(**obj["budget"])
    except ValueError as exc:
        raise ExperimentConfigError(f"$.budget: {exc}") from exc
    if "bins" in obj:
        kw["bins"] = dict(obj["bins"])
    if "sa" in obj:
        kw["sa"] = SAParams(**obj["sa"])
    if "scenario" in obj:
        sc = obj["scenario"]
        kw["scenario"] = sc if sc == "urban" else _load_maybe(sc, base)
    try:
        if "space" in obj:
            kw["space"] = ParameterSpace.from_json(_load_maybe(obj["space"], base))
        if "perception" in obj:
            kw["perception"] = PerceptionParams.from_json(_load_maybe(obj["perception"], base))
        if "settings" in obj:
            kw["settings"] = SimSettings.from_json(_load_maybe(obj["settings"], base))
    except (ConfigError, KeyError, TypeError, ValueError) as exc:
        raise ExperimentConfigError(str(exc)) from exc
    if "spec" in obj:
        spec = obj["spec"]
        path = base / spec
        kw["spec"] = path.read_text() if spec.endswith(".stl") and path.is_file() else spec
    if "sut_exec" in obj:
        kw["sut_exec"] = tuple(obj["sut_exec"])
    cfg = ExperimentConfig(**kw)
    cfg.resolved_space()
    cfg.resolved_spec()
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ExperimentConfigError(f"$: invalid JSON ({exc})") from exc
    return parse_config(obj, path.parent)


# -- scenario binding --------------------------------------------------------------

@dataclass(frozen=True)
class BoundScenario:
    """Base scenario whose fields are overwritten by parameters.

    Parameter names address fields as ``fog``, ``ego.<field>`` or
    ``<agent name>.<field>``; discrete parameters write their level value.
    """

    base: ScenarioConfig

    def check(self, space: ParameterSpace) -> None:
        self(ParamValuation({p.name: 0 for p in space.discrete},
                            {p.name: p.lower for p in space.continuous}), space)

    def __call__(self, v: ParamValuation, space: ParameterSpace) -> ScenarioConfig:
        values = {p.name: p.levels[v.discrete[p.name]] for p in space.discrete}
        values.update(v.continuous)
        cfg = self.base
        agents = {a.name: a for a in cfg.agents}
        ego = cfg.ego
        fog = cfg.fog
        for name, value in values.items():
            if name == "fog":
                fog = bool(value)
                continue
            target, _, attr = name.partition(".")
            if target == "ego" and attr in EgoConfig.__dataclass_fields__:
                ego = replace(ego, **{attr: value})
            elif target in agents and attr in AgentConfig.__dataclass_fields__:
                agents[target] = replace(agents[target], **{attr: value})
            else:
                raise ConfigError(f"parameter {name!r} does not address a scenario field")
        return ScenarioConfig(ego=ego, agents=tuple(agents[a.name] for a in cfg.agents), fog=fog, road=cfg.road)


def build_problem(cfg: ExperimentConfig) -> Problem:
    space = cfg.resolved_space()
    spec_text = cfg.resolved_spec()
    if cfg.sut_exec:
        sut = ExternalSUT(cfg.sut_exec)
        phi = parse_formula(spec_text)
    else:
        if cfg.scenario == "urban":
            builder = urban_scenario
        else:
            builder = BoundScenario(ScenarioConfig.from_json(cfg.scenario))
            builder.check(space)
        sut = ScenarioSUT(space, builder, cfg.perception, cfg.settings, cfg.sim_seed)
        example = sut(ParamValuation({p.name: 0 for p in space.discrete},
                                     {p.name: p.lower for p in space.continuous}))
        phi = parse_formula(spec_text, declared_signals=example.trace.signal_names)
    return Problem(sut, Objective(phi, cfg.mode, cfg.settings.spec.bool_saturation))


# -- truncated normal fit ---------------------------------------------------------

class TruncNormFit(NamedTuple):
    mean: float
    std: float
    warning: str | None = None


def _trunc_nll(mu: float, sigma: float, x: np.ndarray) -> float:
    z = (x - mu) / sigma
    return float(0.5 * np.sum(z * z) + len(x) * (math.log(sigma) + special.log_ndtr(mu / sigma)))


def fit_truncated_normal(samples: Sequence[float]) -> TruncNormFit:
    """Maximum-likelihood ``(mu, sigma)`` of a normal truncated to ``[0, inf)``.

    Profile likelihood: the inner problem fits ``mu`` for a given ``sigma``,
    the outer one searches ``log sigma``; both are bounded 1-D minimisations.
    """
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two samples")
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite and non-negative")
    if np.all(x == x[0]):
        return TruncNormFit(float(x[0]), 0.0, "degenerate: all samples equal")
    scale = max(float(np.std(x)), float(np.mean(x)), 1e-12)
    mu_lo, mu_hi = float(np.min(x)) - 50 * scale, float(np.max(x)) + 50 * scale

    def inner(log_sigma: float):
        sigma = math.exp(log_sigma)
        res = optimize.minimize_scalar(lambda m: _trunc_nll(m, sigma, x), bounds=(mu_lo, mu_hi),
                                       method="bounded", options={"xatol": 1e-10 * scale})
        return res.fun, res.x

    s0 = math.log(scale)
    res = optimize.minimize_scalar(lambda ls: inner(ls)[0], bounds=(s0 - 12, s0 + 6), method="bounded",
                                   options={"xatol": 1e-10})
    mu = inner(res.x)[1]
    warning = None
    if mu - mu_lo < 1e-3 * (mu_hi - mu_lo) or res.x - (s0 - 12) < 1e-6 or (s0 + 6) - res.x < 1e-6:
        # the likelihood keeps rising towards the search boundary (e.g. exponential-like data)
        warning = "maximum at search boundary"
    return TruncNormFit(float(mu), float(math.exp(res.x)), warning)


# -- running ------------------------------------------------------------------------

@dataclass
class ExperimentReport:
    strategies: tuple[str, ...]
    minima: dict[str, list[float]]
    best_robustness: dict[str, list[float]]
    fits: dict[str, TruncNormFit]
    trials: list[TrialResult] = field(repr=False, default_factory=list)
    runtime_s: float = 0.0
    exit_code: int = EXIT_OK


def _cell(args) -> TrialResult:
    cfg, strategy, trial = args
    problem = build_problem(cfg)
    return run_strategy(strategy, cfg.resolved_space(), problem, cfg.budget, cfg.seed + trial,
                        ca_strength=cfg.ca_strength, bins=cfg.bins, sa_params=cfg.sa)


def run_cells(cfg: ExperimentConfig, jobs: int = 1) -> list[TrialResult]:
    """All (strategy, trial) cells, ordered by strategy then trial whatever ``jobs`` is."""
    cells = [(cfg, s, t) for s in cfg.strategies for t in range(cfg.budget.trials)]
    if jobs <= 1:
        out = []
        for c in cells:
            out.append(_cell(c))
            log.info("%s trial %d: best objective %.6g", c[1], c[2], out[-1].best_objective)
        return out
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_cell, cells))


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def write_results(path: Path, cfg: ExperimentConfig, trials: Sequence[TrialResult]) -> None:
    space = cfg.resolved_space()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial", "strategy", "sim_index", *space.names, "robustness", "objective", "wall_ms"])
        for tr in trials:
            trial = tr.seed - cfg.seed
            for e in tr.evaluations:
                w.writerow([trial, tr.strategy, e.index, *map(_fmt, e.valuation.as_row(space)),
                            _fmt(e.robustness), _fmt(e.objective), f"{e.wall_ms:.3f}"])


def write_trials(path: Path, cfg: ExperimentConfig, trials: Sequence[TrialResult]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial", "strategy", "seed", "sims_used", "ca_size", "max_case_sims", "best_sim_index",
                    "best_robustness", "best_objective", "halted"])
        for tr in trials:
            counts = tr.case_counts()
            w.writerow([tr.seed - cfg.seed, tr.strategy, tr.seed, tr.sims_used, tr.ca_size,
                        max(counts.values(), default=0), tr.best.index, _fmt(tr.best_robustness),
                        _fmt(tr.best_objective), int(tr.halted)])


def histogram(minima: Mapping[str, Sequence[float]], bins: int) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Shared bin edges over every strategy's trial minima, and per-strategy counts."""
    allv = np.concatenate([np.asarray(v, dtype=float) for v in minima.values()]) if minima else np.zeros(0)
    lo = min(0.0, float(allv.min())) if allv.size else 0.0
    hi = float(allv.max()) if allv.size else 1.0
    if hi <= lo:
        hi = lo + 1.0
    edges = np.linspace(lo, hi, bins + 1)
    return edges, {s: np.histogram(v, bins=edges)[0] for s, v in minima.items()}


def summarize(cfg: ExperimentConfig, trials: Sequence[TrialResult]) -> ExperimentReport:
    minima: dict[str, list[float]] = {s: [] for s in cfg.strategies}
    robs: dict[str, list[float]] = {s: [] for s in cfg.strategies}
    for tr in trials:
        minima[tr.strategy].append(tr.best_objective)
        robs[tr.strategy].append(tr.best_robustness)
    fits = {}
    for s, v in minima.items():
        if cfg.mode == "glancing" and len(v) >= 2:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                fits[s] = fit_truncated_normal(v)
        else:
            fits[s] = TruncNormFit(float("nan"), float("nan"), "not fitted")
    violated = cfg.mode == "falsify" and any(r < 0 for v in robs.values() for r in v)
    return ExperimentReport(tuple(cfg.strategies), minima, robs, fits, list(trials),
                            exit_code=EXIT_VIOLATION if violated else EXIT_OK)


def write_summary(path: Path, report: ExperimentReport, trials: Sequence[TrialResult]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["strategy", "trials", "mean", "std", "median", "min", "max", "fit_mean", "fit_std",
                    "fit_warning", "mean_sims", "violations"])
        for s in report.strategies:
            v = np.asarray(report.minima[s], dtype=float)
            sims = [t.sims_used for t in trials if t.strategy == s]
            fit = report.fits[s]
            w.writerow([s, len(v), _fmt(v.mean()), _fmt(v.std(ddof=1) if len(v) > 1 else 0.0),
                        _fmt(np.median(v)), _fmt(v.min()), _fmt(v.max()), _fmt(fit.mean), _fmt(fit.std),
                        fit.warning or "", _fmt(np.mean(sims)),
                        sum(1 for r in report.best_robustness[s] if r < 0)])


def write_histogram(path: Path, report: ExperimentReport, bins: int) -> None:
    edges, counts = histogram(report.minima, bins)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", *report.strategies])
        for k in range(bins):
            w.writerow([_fmt(edges[k]), _fmt(edges[k + 1]), *(int(counts[s][k]) for s in report.strategies)])


def run_experiment(cfg: ExperimentConfig | str | Path, out_dir: str | Path = ".", jobs: int = 1,
                   results_name: str = "results.csv") -> ExperimentReport:
    """Run every cell and write results, per-trial, summary and histogram CSVs."""
    if not isinstance(cfg, ExperimentConfig):
        cfg = load_config(cfg)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    trials = run_cells(cfg, jobs)
    report = summarize(cfg, trials)
    report.runtime_s = time.perf_counter() - start
    write_results(out / results_name, cfg, trials)
    write_trials(out / "trials.csv", cfg, trials)
    write_summary(out / "summary.csv", report, trials)
    write_histogram(out / "histogram.csv", report, cfg.histogram_bins)
    return report

