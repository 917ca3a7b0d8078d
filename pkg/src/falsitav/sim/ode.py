"""Two-dimensional nonlinear ODE used as a small falsification benchmark."""
from __future__ import annotations

import math

import numpy as np

from ..trace import Trace

MAX_DT = 0.01
MAX_DURATION = 10.0
DIVERGENCE_BOUND = 1e6

# unsafe boxes: (x1 lo, x1 hi, x2 lo, x2 hi)
UNSAFE_BOXES = ((-1.6, -1.4, -1.1, -0.9), (3.4, 3.6, -1.2, -0.8))


class DivergenceError(RuntimeError):
    pass


def ode_rhs(t: float, x1: float, x2: float) -> tuple[float, float]:
    return (
        x1 - x2 + 0.1 * t,
        x2 * math.cos(2 * math.pi * x2) - x1 * math.sin(2 * math.pi * x1) + 0.1 * t,
    )


def simulate_ode_example(x0: tuple[float, float], duration: float = 2.0, dt: float = 0.005) -> Trace:
    """Fixed-step RK4 from ``x0`` over ``[0, duration]``; signals ``x1`` and ``x2``."""
    if not 0 < dt <= MAX_DT:
        raise ValueError(f"dt must be in (0, {MAX_DT}], got {dt}")
    if not 0 < duration <= MAX_DURATION:
        raise ValueError(f"duration must be in (0, {MAX_DURATION}], got {duration}")
    n = int(round(duration / dt))
    times = np.arange(n + 1) * dt
    xs = np.empty((n + 1, 2))
    a, b = float(x0[0]), float(x0[1])
    xs[0] = a, b
    h2 = 0.5 * dt
    for k in range(n):
        t = times[k]
        k1 = ode_rhs(t, a, b)
        k2 = ode_rhs(t + h2, a + h2 * k1[0], b + h2 * k1[1])
        k3 = ode_rhs(t + h2, a + h2 * k2[0], b + h2 * k2[1])
        k4 = ode_rhs(t + dt, a + dt * k3[0], b + dt * k3[1])
        a += dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        b += dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        if not (abs(a) <= DIVERGENCE_BOUND and abs(b) <= DIVERGENCE_BOUND):
            raise DivergenceError(f"state left |x| <= {DIVERGENCE_BOUND:g} at t = {times[k + 1]:.6g}")
        xs[k + 1] = a, b
    return Trace(times, {"x1": xs[:, 0], "x2": xs[:, 1]})


def _box_text(lo1, hi1, lo2, hi2) -> str:
    return f"always (not (x1 >= {lo1!r} and x1 <= {hi1!r} and x2 >= {lo2!r} and x2 <= {hi2!r}))"


def box_avoidance_formula() -> str:
    """Requirement text: the state never enters either unsafe box."""
    return " and ".join(_box_text(*box) for box in UNSAFE_BOXES)


def enters_box(trace: Trace) -> bool:
    """Direct point-in-box sweep over the samples (closed boxes)."""
    x1, x2 = trace.signals["x1"], trace.signals["x2"]
    for lo1, hi1, lo2, hi2 in UNSAFE_BOXES:
        if np.any((x1 >= lo1) & (x1 <= hi1) & (x2 >= lo2) & (x2 <= hi2)):
            return True
    return False


def ode_landscape(step: float = 0.05, lo: float = -1.0, hi: float = 1.0, duration: float = 2.0, dt: float = 0.005):
    """Grid of initial conditions with robustness and the direct box check.

    Returns arrays ``(x1_0, x2_0, robustness, entered)`` flattened row-major.
    """
    from ..stl import parse_formula, robustness

    phi = parse_formula(box_avoidance_formula())
    count = int(round((hi - lo) / step)) + 1
    grid = lo + step * np.arange(count)
    a0, b0, rob, hit = [], [], [], []
    for a in grid:
        for b in grid:
            tr = simulate_ode_example((float(a), float(b)), duration, dt)
            a0.append(a)
            b0.append(b)
            rob.append(robustness(phi, tr))
            hit.append(enters_box(tr))
    return np.array(a0), np.array(b0), np.array(rob), np.array(hit)
