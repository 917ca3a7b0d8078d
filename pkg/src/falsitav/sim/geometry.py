"""Planar geometry for the spec signals: bumper distance and front corridor.

All functions broadcast over leading array dimensions so a whole trace
(samples x objects) is handled in one call.
"""
from __future__ import annotations

import numpy as np


def rotate(x, y, angle):
    c, s = np.cos(angle), np.sin(angle)
    return c * x - s * y, s * x + c * y


def box_sdf(px, py, hx, hy):
    """Signed distance from points to an origin-centred axis-aligned box."""
    qx = np.abs(px) - hx
    qy = np.abs(py) - hy
    outside = np.hypot(np.maximum(qx, 0.0), np.maximum(qy, 0.0))
    inside = np.minimum(np.maximum(qx, qy), 0.0)
    return outside + inside


def _line_params(a, d, target):
    """Parameter s where ``a + s*d == target`` (componentwise scalar), clamped to [0, 1]."""
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (target - a) / d
    s = np.where(np.isfinite(s), s, 0.0)
    return np.clip(s, 0.0, 1.0)


def segment_box_distance(ax, ay, bx, by, hx, hy):
    """min over the segment a-b of the box signed distance.

    The box SDF is convex and piecewise smooth, so its minimum along a
    segment sits at an endpoint, a crossing of a region boundary (the lines
    |x| = hx, |y| = hy, x = 0, y = 0 and the diagonals |x| - hx = |y| - hy)
    or at the projection of a corner. Evaluating all candidates is exact.
    """
    ax, ay, bx, by, hx, hy = np.broadcast_arrays(*map(np.asarray, (ax, ay, bx, by, hx, hy)))
    dx, dy = bx - ax, by - ay
    cands = [np.zeros_like(ax, dtype=float), np.ones_like(ax, dtype=float)]
    for tx in (hx, -hx, 0.0 * hx):
        cands.append(_line_params(ax, dx, tx))
    for ty in (hy, -hy, 0.0 * hy):
        cands.append(_line_params(ay, dy, ty))
    # diagonals: sx*x - sy*y = hx - hy for sx, sy in {+1, -1}
    for sx in (1.0, -1.0):
        for sy in (1.0, -1.0):
            cands.append(_line_params(sx * ax - sy * ay, sx * dx - sy * dy, hx - hy))
    len2 = dx * dx + dy * dy
    for cx in (hx, -hx):
        for cy in (hy, -hy):
            with np.errstate(divide="ignore", invalid="ignore"):
                s = ((cx - ax) * dx + (cy - ay) * dy) / len2
            cands.append(np.clip(np.where(np.isfinite(s), s, 0.0), 0.0, 1.0))
    s = np.stack(cands)
    vals = box_sdf(ax + s * dx, ay + s * dy, hx, hy)
    return vals.min(axis=0)


def segment_disc_distance(ax, ay, bx, by, cx, cy, r):
    dx, dy = bx - ax, by - ay
    len2 = dx * dx + dy * dy
    with np.errstate(divide="ignore", invalid="ignore"):
        s = ((cx - ax) * dx + (cy - ay) * dy) / len2
    s = np.clip(np.where(np.isfinite(s), s, 0.0), 0.0, 1.0)
    return np.hypot(ax + s * dx - cx, ay + s * dy - cy) - r


def bumper_segment(x, y, heading, length, width):
    """World endpoints of the front bumper of a vehicle centred at (x, y)."""
    fx = x + 0.5 * length * np.cos(heading)
    fy = y + 0.5 * length * np.sin(heading)
    ox, oy = rotate(0.0, 0.5 * width, heading)
    return fx - ox, fy - oy, fx + ox, fy + oy


def bumper_distance(bumper, obj_x, obj_y, obj_heading, half_len, half_wid, radius, is_disc):
    """Signed distance from a bumper segment to an object (negative on overlap).

    ``is_disc`` selects the disc model (radius) over the rectangle model
    (half_len, half_wid); arrays broadcast.
    """
    ax, ay, bx, by = bumper
    lax, lay = rotate(ax - obj_x, ay - obj_y, -obj_heading)
    lbx, lby = rotate(bx - obj_x, by - obj_y, -obj_heading)
    rect = segment_box_distance(lax, lay, lbx, lby, half_len, half_wid)
    disc = segment_disc_distance(ax, ay, bx, by, obj_x, obj_y, radius)
    return np.where(is_disc, disc, rect)


def in_corridor(ego_x, ego_y, ego_heading, ego_length, corridor_length, corridor_half_width,
                obj_x, obj_y, obj_heading, half_len, half_wid, radius, is_disc):
    """True where the object overlaps the corridor ahead of the ego bumper."""
    # object centre in the ego frame
    rx, ry = rotate(obj_x - ego_x, obj_y - ego_y, -ego_heading)
    x0 = 0.5 * ego_length
    box_cx = x0 + 0.5 * corridor_length
    box_hx = 0.5 * corridor_length
    box_hy = corridor_half_width
    # disc: distance from centre to the box
    qx = np.maximum(np.abs(rx - box_cx) - box_hx, 0.0)
    qy = np.maximum(np.abs(ry) - box_hy, 0.0)
    disc_hit = np.hypot(qx, qy) < radius
    # rectangle: separating axis test over the four box/rect axes
    th = obj_heading - ego_heading
    c, s = np.abs(np.cos(th)), np.abs(np.sin(th))
    ddx, ddy = rx - box_cx, ry
    sep_x = np.abs(ddx) >= box_hx + half_len * c + half_wid * s
    sep_y = np.abs(ddy) >= box_hy + half_len * s + half_wid * c
    ux, uy = np.cos(th), np.sin(th)
    pu = np.abs(ddx * ux + ddy * uy)
    pv = np.abs(-ddx * uy + ddy * ux)
    sep_u = pu >= half_len + box_hx * c + box_hy * s
    sep_v = pv >= half_wid + box_hx * s + box_hy * c
    rect_hit = ~(sep_x | sep_y | sep_u | sep_v)
    return np.where(is_disc, disc_hit, rect_hit)
