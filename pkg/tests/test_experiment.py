import csv
import json
import math

import numpy as np
import pytest

from falsitav.experiment import (
    EXIT_VIOLATION,
    BoundScenario,
    ExperimentConfig,
    ExperimentConfigError,
    fit_truncated_normal,
    histogram,
    load_config,
    parse_config,
    run_experiment,
)
from falsitav.falsify import Budget
from falsitav.sim import ScenarioConfig, urban_scenario, default_valuation, urban_space
from falsitav.trace import ParamValuation

SMALL_SCENARIO = {
    "ego": {"init_longitudinal_position": 0.0, "init_speed": 10.0, "lane": 1},
    "agents": [{"name": "c", "kind": "parked_vehicle", "longitudinal_position": 60.0, "lateral": 0.0}],
}
SMALL_SPACE = {
    "discrete": [{"name": "c.color", "levels": ["white", "black"]}, {"name": "fog", "levels": [False, True]}],
    "continuous": [{"name": "c.longitudinal_position", "lower": 40.0, "upper": 80.0}],
}
SMALL_SPEC = "always (v_ego > 0.5 -> (not (dist_c < 0.5 and front_c > 0) and not (dist_c < 0)))"


def _small(**kw):
    obj = {"scenario": SMALL_SCENARIO, "space": SMALL_SPACE, "spec": SMALL_SPEC,
           "settings": {"horizon": 8.0}, "budget": {"total_sims": 8, "per_case_cap": 3, "trials": 2}}
    obj.update(kw)
    return parse_config(obj)


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_single_cell_single_row(tmp_path):
    cfg = _small(strategies=["ur"], budget={"total_sims": 1, "per_case_cap": 1, "trials": 1})
    rep = run_experiment(cfg, tmp_path)
    rows = _rows(tmp_path / "results.csv")
    assert len(rows) == 1
    assert list(rows[0]) == ["trial", "strategy", "sim_index", "c.color", "fog", "c.longitudinal_position",
                             "robustness", "objective", "wall_ms"]
    assert rep.exit_code == 0


def test_three_strategies_summary_and_order(tmp_path):
    rep = run_experiment(_small(), tmp_path)
    summary = _rows(tmp_path / "summary.csv")
    assert [r["strategy"] for r in summary] == ["ur", "ca-ur", "ca-sa"]
    assert {"mean", "std", "fit_mean", "fit_std"} <= set(summary[0])
    rows = _rows(tmp_path / "results.csv")
    keys = [(["ur", "ca-ur", "ca-sa"].index(r["strategy"]), int(r["trial"]), int(r["sim_index"])) for r in rows]
    assert keys == sorted(keys) and len(rows) == 3 * 2 * 8
    # summary is recomputable from results.csv alone
    for s in ("ur", "ca-ur", "ca-sa"):
        minima = [min(float(r["objective"]) for r in rows if r["strategy"] == s and r["trial"] == t)
                  for t in ("0", "1")]
        assert minima == rep.minima[s]
        assert all(m >= 0 for m in minima)
    hist = _rows(tmp_path / "histogram.csv")
    assert sum(int(h["ur"]) for h in hist) == 2


def test_parallel_matches_sequential(tmp_path):
    cfg = _small()
    run_experiment(cfg, tmp_path / "a", jobs=1)
    run_experiment(cfg, tmp_path / "b", jobs=2)
    strip = lambda p: [{k: v for k, v in r.items() if k != "wall_ms"} for r in _rows(p)]  # noqa: E731
    assert strip(tmp_path / "a" / "results.csv") == strip(tmp_path / "b" / "results.csv")


def test_falsify_mode_exit_code(tmp_path):
    cfg = _small(mode="falsify", spec="v_ego <= -1", strategies=["ur"])
    rep = run_experiment(cfg, tmp_path)
    assert rep.exit_code == EXIT_VIOLATION
    assert len(_rows(tmp_path / "results.csv")) == 2  # one simulation per trial


@pytest.mark.parametrize(
    "obj, path",
    [
        ({"budget": {"total_sims": 0}}, "$.budget.total_sims"),
        ({"strategies": ["ur", "nope"]}, "$.strategies[1]"),
        ({"mode": "max"}, "$.mode"),
        ({"colour": 1}, "$"),
        ({"sa": {"t0": -1}}, "$.sa.t0"),
    ],
)
def test_config_errors_name_json_path(obj, path):
    with pytest.raises(ExperimentConfigError) as exc:
        parse_config(obj)
    assert str(exc.value).startswith(path + ":")


def test_config_needs_space_and_spec_for_custom_scenario():
    with pytest.raises(ExperimentConfigError, match="space"):
        parse_config({"scenario": SMALL_SCENARIO, "spec": "x >= 0"})


def test_config_file_with_relative_paths(tmp_path):
    (tmp_path / "scn.json").write_text(json.dumps(SMALL_SCENARIO))
    (tmp_path / "space.json").write_text(json.dumps(SMALL_SPACE))
    (tmp_path / "req.stl").write_text(SMALL_SPEC)
    (tmp_path / "exp.json").write_text(json.dumps({"scenario": "scn.json", "space": "space.json",
                                                    "spec": "req.stl", "budget": {"trials": 1}}))
    cfg = load_config(tmp_path / "exp.json")
    assert cfg.spec == SMALL_SPEC and cfg.budget == Budget(200, 50, 1)
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(ExperimentConfigError):
        load_config(tmp_path / "bad.json")


def test_bound_scenario_writes_fields():
    cfg = _small()
    b = BoundScenario(ScenarioConfig.from_json(SMALL_SCENARIO))
    out = b(ParamValuation({"c.color": 1, "fog": 1}, {"c.longitudinal_position": 55.0}), cfg.space)
    assert out.fog and out.agents[0].color == "black" and out.agents[0].longitudinal_position == 55.0


def test_urban_defaults_resolve():
    cfg = ExperimentConfig()
    assert len(cfg.resolved_space().continuous) == 3
    assert "dist_jw" in cfg.resolved_spec()


def test_fit_far_from_zero_matches_moments():
    x = np.random.default_rng(0).normal(100.0, 1.0, 2000)
    fit = fit_truncated_normal(x)
    assert fit.mean == pytest.approx(x.mean(), rel=0.01)
    assert fit.std == pytest.approx(x.std(), rel=0.01)


def test_fit_brackets_small_sample():
    fit = fit_truncated_normal([0.1, 0.2, 0.3])
    assert 0.1 <= fit.mean <= 0.3 and fit.warning is None


def test_fit_degenerate_and_errors():
    assert fit_truncated_normal([0.4, 0.4, 0.4]) == (0.4, 0.0, "degenerate: all samples equal")
    with pytest.raises(ValueError):
        fit_truncated_normal([1.0])
    with pytest.raises(ValueError):
        fit_truncated_normal([1.0, -1.0])


def test_fit_is_mle():
    from falsitav.experiment import _trunc_nll

    x = np.array([0.22, 0.15, 0.31, 0.18, 0.27, 0.09, 0.2])
    fit = fit_truncated_normal(x)
    assert fit.warning is None
    base = _trunc_nll(fit.mean, fit.std, x)
    for dm, ds in ((0.01, 0), (-0.01, 0), (0, 0.01), (0, -0.01)):
        assert _trunc_nll(fit.mean + dm, fit.std + ds, x) >= base - 1e-9


def test_fit_flags_unbounded_likelihood():
    # strongly decaying samples push the location towards minus infinity
    fit = fit_truncated_normal([0.001, 0.002, 0.004, 0.01, 0.05, 0.3, 0.003])
    assert fit.warning == "maximum at search boundary"


def test_histogram_shared_edges():
    edges, counts = histogram({"a": [0.1, 0.2], "b": [0.5]}, 4)
    assert edges[0] == 0.0 and math.isclose(edges[-1], 0.5)
    assert counts["a"].sum() == 2 and counts["b"].sum() == 1
