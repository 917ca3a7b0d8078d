"""Surrogate object detector with parameterised failure modes."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import PerceptionParams


@dataclass(frozen=True)
class SceneObject:
    """Ground-truth object as seen from the ego bumper (x forward, y left)."""

    id: str
    cls: str  # "vehicle" | "pedestrian"
    rel_x: float
    rel_y: float
    miss_probability: float


@dataclass(frozen=True)
class Detection:
    id: str
    cls: str
    rel_x: float
    rel_y: float
    detected: bool


def detect(rel_x, rel_y, miss, u, noise, pp: PerceptionParams):
    """Vectorised detector core on pre-drawn randomness.

    ``u`` holds one uniform per object and ``noise`` one standard-normal pair
    per object. Returns the hit mask and the noisy positions.
    """
    rel_x = np.asarray(rel_x, dtype=float)
    rel_y = np.asarray(rel_y, dtype=float)
    in_range = (rel_x >= 0.0) & (np.hypot(rel_x, rel_y) <= pp.max_detection_range)
    hit = in_range & (u >= np.minimum(miss, pp.max_miss_probability))
    sd = pp.position_noise_std
    return hit, rel_x + sd * noise[..., 0], rel_y + sd * noise[..., 1]


def perceive(scene: Sequence[SceneObject], pp: PerceptionParams, rng: np.random.Generator) -> list[Detection]:
    """One detector frame.

    Every object consumes exactly one uniform and two normal draws whether or
    not it is in range, so the random stream stays aligned across scenarios
    that differ only in geometry.
    """
    n = len(scene)
    u = rng.random(n)
    noise = rng.standard_normal((n, 2))
    hit, nx, ny = detect([o.rel_x for o in scene], [o.rel_y for o in scene],
                         np.array([o.miss_probability for o in scene]), u, noise, pp)
    nan = float("nan")
    return [
        Detection(o.id, o.cls, float(nx[k]), float(ny[k]), True) if hit[k]
        else Detection(o.id, o.cls, nan, nan, False)
        for k, o in enumerate(scene)
    ]
