"""Box-constrained simulated annealing with reflecting proposals."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class SAParams:
    """Geometric cooling from ``t0`` to ``t_final`` over ``schedule_length`` proposals.

    Proposal std per coordinate is ``step_fraction`` of the interval width,
    shrunk by ``sqrt(T / t0)``. ``schedule_length=None`` means the number of
    evaluations of the run. With ``relative`` set, temperatures are in units
    of the starting cost ``|f(init)|`` instead of objective units.
    """

    t0: float = 1.0
    t_final: float = 0.01
    step_fraction: float = 0.1
    schedule_length: int | None = None
    relative: bool = True

    def temperature(self, m: int, length: int) -> float:
        if self.t0 <= 0:
            return 0.0
        if length <= 1:
            return self.t0
        alpha = (self.t_final / self.t0) ** (1.0 / (length - 1))
        return self.t0 * alpha**m

    def step_scale(self, temp: float) -> float:
        if self.t0 <= 0:
            return 0.0
        return self.step_fraction * math.sqrt(temp / self.t0)


def reflect(x: float, lo: float, hi: float) -> float:
    """Fold ``x`` back into ``[lo, hi]`` by mirroring at the bounds."""
    width = hi - lo
    if width <= 0:
        return lo
    y = math.fmod(x - lo, 2 * width)
    if y < 0:
        y += 2 * width
    if y > width:
        y = 2 * width - y
    return min(max(lo + y, lo), hi)


def simulated_annealing(
    init: Sequence[float],
    obj: Callable[[np.ndarray], float],
    evals: int,
    bounds: Sequence[tuple[float, float]],
    params: SAParams = SAParams(),
    seed: int | np.random.Generator = 0,
    init_value: float | None = None,
) -> tuple[np.ndarray, float, list[tuple[np.ndarray, float, bool]]]:
    """Minimise ``obj`` using ``evals`` calls; returns ``(best x, best f, history)``.

    ``init_value`` supplies an already known ``obj(init)`` so that no call is
    spent on it; otherwise the first call evaluates ``init``. ``history``
    lists ``(x, f, accepted)`` per call.
    """
    if evals < 1:
        raise ValueError("evals must be >= 1")
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    x = np.asarray(init, dtype=float).copy()
    if x.shape != lo.shape or np.any(x < lo) or np.any(x > hi):
        raise ValueError("init must lie within bounds")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    history: list[tuple[np.ndarray, float, bool]] = []
    if init_value is None:
        fx = float(obj(x.copy()))
        history.append((x.copy(), fx, True))
        budget = evals - 1
    else:
        fx = float(init_value)
        budget = evals
    best_x, best_f = x.copy(), fx
    length = params.schedule_length or max(budget, 1)
    scale = abs(fx) if params.relative and math.isfinite(fx) and fx != 0 else 1.0
    width = hi - lo
    for m in range(budget):
        temp = params.temperature(m, length)
        step = rng.standard_normal(len(x)) * width * params.step_scale(temp)
        cand = np.array([reflect(v, a, b) for v, a, b in zip(x + step, lo, hi)])
        fc = float(obj(cand.copy()))
        delta = fc - fx
        u = rng.random()
        accept = delta <= 0 or (temp > 0 and u < math.exp(-delta / (temp * scale)))
        history.append((cand, fc, accept))
        if accept:
            x, fx = cand, fc
        if fc < best_f:
            best_x, best_f = cand.copy(), fc
    return best_x, best_f, history
