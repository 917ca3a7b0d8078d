"""Robust and Boolean semantics of STL over sampled traces.

:func:`robustness` computes the value of every sub-formula at every sample
index (bottom-up, numpy vectors) and reads off index ``i``. Timed windows are
taken on timestamps: sample ``j`` is in the window of ``i`` when
``t_j - t_i`` lies in the operator's interval.

:func:`eval_boolean` is a deliberately naive recursive implementation of the
classical semantics. It shares nothing with the robust evaluator beyond the
AST and is used as a cross-check.
"""
from __future__ import annotations

import math

import numpy as np

from ..trace import Trace, UnknownSignalError
from .ast import (
    Always,
    And,
    Eventually,
    Formula,
    Implies,
    Interval,
    Next,
    Not,
    Or,
    Predicate,
    Release,
    TrueF,
    Until,
)

INF = math.inf


def predicate_margin(pred: Predicate, trace: Trace) -> np.ndarray:
    acc = np.full(len(trace), pred.const)
    for name, c in pred.terms:
        if name not in trace.signals:
            raise UnknownSignalError(name)
        acc = acc + c * trace.signals[name]
    return acc


def _window(times: np.ndarray, i: int, iv: Interval) -> tuple[int, int]:
    d = times - times[i]
    lo = int(np.searchsorted(d, iv.lo, side="left" if iv.lo_closed else "right"))
    if math.isinf(iv.hi):
        hi = len(times)
    else:
        hi = int(np.searchsorted(d, iv.hi, side="right" if iv.hi_closed else "left"))
    return max(lo, i), hi


def _eventually(arg: np.ndarray, times: np.ndarray, iv: Interval) -> np.ndarray:
    n = len(arg)
    out = np.full(n, -INF)
    if math.isinf(iv.hi):
        suffix_max = np.maximum.accumulate(arg[::-1])[::-1]
        for i in range(n):
            lo, _ = _window(times, i, iv)
            if lo < n:
                out[i] = suffix_max[lo]
        return out
    for i in range(n):
        lo, hi = _window(times, i, iv)
        if lo < hi:
            out[i] = arg[lo:hi].max()
    return out


def _until(left: np.ndarray, right: np.ndarray, times: np.ndarray, iv: Interval) -> np.ndarray:
    n = len(right)
    out = np.full(n, -INF)
    for i in range(n):
        lo, hi = _window(times, i, iv)
        if lo >= hi:
            continue
        # running_min[j - i] = min(left[i:j]), +inf for j == i
        running_min = np.empty(hi - i)
        running_min[0] = INF
        if hi - i > 1:
            np.minimum.accumulate(left[i : hi - 1], out=running_min[1:])
        out[i] = np.minimum(right[lo:hi], running_min[lo - i :]).max()
    return out


def robustness_signal(phi: Formula, trace: Trace) -> np.ndarray:
    """Robustness of ``phi`` at every sample index of ``trace``."""
    cache: dict[int, np.ndarray] = {}
    times = trace.times
    n = len(times)

    def ev(f: Formula) -> np.ndarray:
        key = id(f)
        if key in cache:
            return cache[key]
        if isinstance(f, TrueF):
            r = np.full(n, INF)
        elif isinstance(f, Predicate):
            r = predicate_margin(f, trace)
        elif isinstance(f, Not):
            r = -ev(f.arg)
        elif isinstance(f, Or):
            r = np.maximum(ev(f.left), ev(f.right))
        elif isinstance(f, And):
            r = np.minimum(ev(f.left), ev(f.right))
        elif isinstance(f, Implies):
            r = np.maximum(-ev(f.left), ev(f.right))
        elif isinstance(f, Next):
            a = ev(f.arg)
            r = np.empty(n)
            r[:-1] = a[1:]
            r[-1] = -INF
        elif isinstance(f, Eventually):
            r = _eventually(ev(f.arg), times, f.interval)
        elif isinstance(f, Always):
            r = -_eventually(-ev(f.arg), times, f.interval)
        elif isinstance(f, Until):
            left = f.left
            if isinstance(left, TrueF):
                r = _eventually(ev(f.right), times, f.interval)
            else:
                r = _until(ev(left), ev(f.right), times, f.interval)
        elif isinstance(f, Release):
            r = -_until(-ev(f.left), -ev(f.right), times, f.interval)
        else:
            raise TypeError(f"not a formula: {f!r}")
        cache[key] = r
        return r

    return ev(phi)


def robustness(phi: Formula, trace: Trace, i: int = 0) -> float:
    if not 0 <= i < len(trace):
        raise IndexError(f"index {i} out of range for trace of length {len(trace)}")
    return float(robustness_signal(phi, trace)[i])


def eval_boolean(phi: Formula, trace: Trace, i: int = 0) -> bool:
    """Classical Boolean satisfaction of ``phi`` at sample ``i``."""
    times = [float(t) for t in trace.times]
    cols = {k: [float(x) for x in v] for k, v in trace.signals.items()}
    n = len(times)
    memo: dict[tuple[Formula, int], bool] = {}

    def window(i: int, iv: Interval) -> list[int]:
        return [j for j in range(i, n) if iv.contains(times[j] - times[i])]

    def sat(f: Formula, i: int) -> bool:
        key = (f, i)
        if key in memo:
            return memo[key]
        if isinstance(f, TrueF):
            v = True
        elif isinstance(f, Predicate):
            e = f.const
            for name, c in f.terms:
                if name not in cols:
                    raise UnknownSignalError(name)
                e = e + c * cols[name][i]
            v = e > 0 if f.strict else e >= 0
        elif isinstance(f, Not):
            v = not sat(f.arg, i)
        elif isinstance(f, Or):
            v = sat(f.left, i) or sat(f.right, i)
        elif isinstance(f, And):
            v = sat(f.left, i) and sat(f.right, i)
        elif isinstance(f, Implies):
            v = (not sat(f.left, i)) or sat(f.right, i)
        elif isinstance(f, Next):
            v = i + 1 < n and sat(f.arg, i + 1)
        elif isinstance(f, Eventually):
            v = any(sat(f.arg, j) for j in window(i, f.interval))
        elif isinstance(f, Always):
            v = all(sat(f.arg, j) for j in window(i, f.interval))
        elif isinstance(f, Until):
            v = any(
                sat(f.right, j) and all(sat(f.left, k) for k in range(i, j))
                for j in window(i, f.interval)
            )
        elif isinstance(f, Release):
            v = all(
                sat(f.right, j) or any(sat(f.left, k) for k in range(i, j))
                for j in window(i, f.interval)
            )
        else:
            raise TypeError(f"not a formula: {f!r}")
        memo[key] = v
        return v

    return sat(phi, i)
