"""Command-line entry point: ``falsitav <command> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import shlex
import sys
from pathlib import Path

from . import __version__

log = logging.getLogger("falsitav")

LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


def _configure_logging() -> None:
    name = os.environ.get("FALSITAV_LOG", "error").lower()
    logging.basicConfig(level=LOG_LEVELS.get(name, logging.ERROR), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _globals(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=int, default=d(0), help="master random seed")
    parser.add_argument("--jobs", type=int, default=d(1), help="worker processes")
    parser.add_argument("--out-dir", default=d("."), help="directory for output files")


def _out(args, path: str | None, default: str) -> Path:
    p = Path(path or default)
    if not p.is_absolute():
        p = Path(args.out_dir) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


# -- monitor ---------------------------------------------------------------------

def cmd_monitor(args) -> int:
    from .stl import eval_boolean, parse_formula, robustness
    from .trace import read_trace_csv

    text = Path(args.formula_file).read_text() if args.formula_file else args.formula
    trace = read_trace_csv(args.trace)
    phi = parse_formula(text, declared_signals=trace.signal_names)
    r = robustness(phi, trace, args.index)
    print(f"{r:.17g}")
    if args.boolean:
        print("satisfied" if eval_boolean(phi, trace, args.index) else "violated")
    return 0


# -- simulate --------------------------------------------------------------------

def _scenario_and_space(args):
    from .experiment import BoundScenario
    from .sim import ScenarioConfig, default_valuation, urban_scenario, urban_space
    from .trace import ParamValuation, load_space

    params = None
    if args.params:
        params = ParamValuation.from_json(json.loads(Path(args.params).read_text()))
    if args.scenario == "urban":
        space = urban_space()
        return urban_scenario(params or default_valuation(space), space)
    cfg = ScenarioConfig.from_json(json.loads(Path(args.scenario).read_text()))
    if params is not None:
        if not args.space:
            raise ValueError("--params with a scenario file also needs --space")
        cfg = BoundScenario(cfg)(params, load_space(args.space))
    return cfg


def cmd_simulate(args) -> int:
    from .sim import PerceptionParams, SimSettings, simulate
    from .trace import write_trace_csv

    cfg = _scenario_and_space(args)
    pp = PerceptionParams.from_json(json.loads(Path(args.perception).read_text())) if args.perception \
        else PerceptionParams()
    settings = SimSettings.from_json(json.loads(Path(args.settings).read_text())) if args.settings \
        else SimSettings()
    out = simulate(cfg, pp, dt=args.dt, horizon=args.horizon, seed=args.seed, settings=settings)
    path = _out(args, args.trace_out, "trace.csv")
    write_trace_csv(out.trace, path)
    print(json.dumps({"collision": out.collision, "collision_speed": out.collision_speed,
                      "collided_with": out.collided_with, "steps": out.steps, "trace": str(path)}))
    return 0


# -- cagen -----------------------------------------------------------------------

def _domains(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad domain list {text!r}") from exc


def cmd_cagen(args) -> int:
    from .covering import generate, read_ca_csv, verify_coverage, write_ca_csv

    if args.cagen_cmd == "verify":
        ca = read_ca_csv(args.input, args.strength, args.domains)
        missing = verify_coverage(ca)
        if not missing:
            print("COVERED")
            return 0
        for subset, levels in missing:
            print(" ".join(f"p{i + 1}={lv}" for i, lv in zip(subset, levels)))
        return 1
    if not args.domains:
        raise ValueError("--domains is required")
    ca = generate(args.strength, args.domains, seed=args.seed, candidates=args.candidates)
    path = _out(args, args.out, "ca.csv")
    write_ca_csv(ca, path)
    print(f"{len(ca)} rows -> {path}")
    return 0


# -- falsify / experiment ----------------------------------------------------------

def _report(report, out_dir: Path) -> None:
    for s in report.strategies:
        v = report.minima[s]
        fit = report.fits[s]
        print(f"{s:6s} trials={len(v)} mean={sum(v) / len(v):.6g} fit_mean={fit.mean:.6g} fit_std={fit.std:.6g}")
    print(f"artifacts in {out_dir}")


def cmd_falsify(args) -> int:
    from .experiment import parse_config, run_experiment

    obj = {
        "mode": args.mode,
        "strategies": [args.strategy],
        "budget": {"total_sims": args.budget, "per_case_cap": min(args.per_case_cap, args.budget),
                   "trials": args.trials},
        "seed": args.seed,
        "ca_strength": args.strength,
    }
    base = Path.cwd()
    if args.scenario != "urban":
        obj["scenario"] = str(Path(args.scenario).resolve())
    if args.space:
        obj["space"] = str(Path(args.space).resolve())
    if args.spec:
        obj["spec"] = Path(args.spec).read_text()
    if args.perception:
        obj["perception"] = str(Path(args.perception).resolve())
    if args.sut_exec:
        obj["sut_exec"] = shlex.split(args.sut_exec)
    cfg = parse_config(obj, base)
    results = _out(args, args.out, "results.csv")
    report = run_experiment(cfg, results.parent, jobs=args.jobs, results_name=results.name)
    _report(report, results.parent)
    return report.exit_code


def cmd_experiment(args) -> int:
    from .experiment import load_config, run_experiment

    cfg = load_config(args.config)
    out = Path(args.out_dir)
    report = run_experiment(cfg, out, jobs=args.jobs)
    _report(report, out)
    log.info("runtime %.1f s", report.runtime_s)
    return report.exit_code


# -- ode-bench ---------------------------------------------------------------------

def cmd_ode_bench(args) -> int:
    import csv

    from .sim.ode import ode_landscape

    a, b, r, hit = ode_landscape(args.step, args.lo, args.hi, args.duration, args.dt)
    path = _out(args, args.out, "ode_landscape.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x1_0", "x2_0", "robustness", "enters_box"])
        for row in zip(a, b, r, hit):
            w.writerow([repr(float(row[0])), repr(float(row[1])), repr(float(row[2])), int(row[3])])
    agree = float(((r < 0) == hit).mean())
    print(f"{len(r)} initial conditions, {int((r < 0).sum())} falsifying, sign agreement {agree:.4f} -> {path}")
    return 0


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="falsitav", description="STL monitoring, covering arrays and "
                                "simulation-based falsification of a perception-driven vehicle.")
    p.add_argument("--version", action="version", version=__version__)
    _globals(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("monitor", help="robustness of a formula on a trace CSV")
    _globals(m, True)
    g = m.add_mutually_exclusive_group(required=True)
    g.add_argument("--formula")
    g.add_argument("--formula-file")
    m.add_argument("--trace", required=True)
    m.add_argument("--index", type=int, default=0, help="sample index to evaluate at")
    m.add_argument("--boolean", action="store_true", help="also print the classical verdict")
    m.set_defaults(func=cmd_monitor)

    s = sub.add_parser("simulate", help="run one closed-loop simulation")
    _globals(s, True)
    s.add_argument("--scenario", default="urban", help="scenario JSON or 'urban'")
    s.add_argument("--space", help="parameter space JSON (for --params with a scenario file)")
    s.add_argument("--params", help="parameter valuation JSON")
    s.add_argument("--perception")
    s.add_argument("--settings")
    s.add_argument("--dt", type=float)
    s.add_argument("--horizon", type=float)
    s.add_argument("--trace-out")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("cagen", help="generate or verify a covering array")
    _globals(c, True)
    c.add_argument("--strength", type=int, default=2)
    c.add_argument("--domains", type=_domains)
    c.add_argument("--candidates", type=int, default=50)
    c.add_argument("--out")
    csub = c.add_subparsers(dest="cagen_cmd")
    cv = csub.add_parser("verify", help="list uncovered combinations, or print COVERED")
    cv.add_argument("--in", dest="input", required=True)
    cv.add_argument("--strength", type=int, required=True)
    cv.add_argument("--domains", type=_domains)
    c.set_defaults(func=cmd_cagen)

    f = sub.add_parser("falsify", help="run one search strategy")
    _globals(f, True)
    f.add_argument("--strategy", choices=("ur", "ca-ur", "ca-sa"), required=True)
    f.add_argument("--scenario", default="urban")
    f.add_argument("--space")
    f.add_argument("--spec", help="file holding the requirement formula")
    f.add_argument("--perception")
    f.add_argument("--mode", choices=("glancing", "falsify"), default="glancing")
    f.add_argument("--budget", type=int, default=200)
    f.add_argument("--per-case-cap", type=int, default=50)
    f.add_argument("--trials", type=int, default=1)
    f.add_argument("--strength", type=int, default=2)
    f.add_argument("--sut-exec", help="external simulator command (valuation JSON in, trace CSV out)")
    f.add_argument("--out")
    f.set_defaults(func=cmd_falsify)

    e = sub.add_parser("experiment", help="run an experiment config")
    _globals(e, True)
    e.add_argument("--config", required=True)
    e.set_defaults(func=cmd_experiment)

    o = sub.add_parser("ode-bench", help="robustness landscape of the ODE example")
    _globals(o, True)
    o.add_argument("--step", type=float, default=0.05)
    o.add_argument("--lo", type=float, default=-1.0)
    o.add_argument("--hi", type=float, default=1.0)
    o.add_argument("--duration", type=float, default=2.0)
    o.add_argument("--dt", type=float, default=0.005)
    o.add_argument("--out")
    o.set_defaults(func=cmd_ode_bench)
    return p


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
