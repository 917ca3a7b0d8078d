"""Kinematic bicycle model referenced at the centre of the vehicle."""
from __future__ import annotations

import math

from .config import VehicleParams


def acceleration(throttle: float, brake: float, speed: float, p: VehicleParams) -> float:
    return p.throttle_accel * throttle - p.drag * speed - p.max_decel * brake


def bicycle_step(x, y, heading, speed, throttle, brake, steering, dt, p: VehicleParams):
    """Advance one explicit-Euler step; returns the new (x, y, heading, speed)."""
    throttle = min(max(throttle, 0.0), 1.0)
    brake = min(max(brake, 0.0), 1.0)
    delta = min(max(steering, -p.max_steer), p.max_steer)
    lr = 0.5 * p.wheelbase
    beta = math.atan(0.5 * math.tan(delta))
    nx = x + speed * math.cos(heading + beta) * dt
    ny = y + speed * math.sin(heading + beta) * dt
    nh = heading + speed / lr * math.sin(beta) * dt
    nv = speed + acceleration(throttle, brake, speed, p) * dt
    nv = min(max(nv, 0.0), p.speed_cap)
    return nx, ny, nh, nv
