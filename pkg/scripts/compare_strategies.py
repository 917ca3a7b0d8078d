#!/usr/bin/env python3
"""Compare the three search strategies on the pedestrian scenario and check the ordering."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np
from scipy.stats import binomtest

from falsitav.experiment import run_experiment

ROOT = Path(__file__).resolve().parent.parent


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=str(ROOT / "configs" / "urban_glancing.json"))
    ap.add_argument("--out-dir", default="strategy_run")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args(argv)

    report = run_experiment(args.config, args.out_dir, jobs=args.jobs)
    for s in report.strategies:
        v = np.asarray(report.minima[s])
        fit = report.fits[s]
        note = f"  ({fit.warning})" if fit.warning else ""
        print(f"{s:6s} mean={v.mean():.5f} median={np.median(v):.5f} "
              f"trunc-normal mu={fit.mean:.5f} sigma={fit.std:.5f}{note}")
    if {"ur", "ca-sa"} <= set(report.strategies):
        sa, ur = np.asarray(report.minima["ca-sa"]), np.asarray(report.minima["ur"])
        wins, losses = int((sa < ur).sum()), int((sa > ur).sum())
        if wins + losses:
            p = binomtest(wins, wins + losses, 0.5, alternative="greater").pvalue
            print(f"paired sign test ca-sa < ur: {wins} wins, {losses} losses, p = {p:.4g}")
    print(f"runtime {report.runtime_s / 60:.1f} min, artifacts in {args.out_dir}")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
