import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from falsitav.sim.geometry import (
    box_sdf,
    bumper_distance,
    bumper_segment,
    in_corridor,
    segment_box_distance,
    segment_disc_distance,
)

coord = st.floats(-10, 10)


def _brute_segment_box(ax, ay, bx, by, hx, hy, n=4001):
    s = np.linspace(0, 1, n)
    return box_sdf(ax + s * (bx - ax), ay + s * (by - ay), hx, hy).min()


@given(coord, coord, coord, coord, st.floats(0.1, 4), st.floats(0.1, 4))
def test_segment_box_is_exact_minimum(ax, ay, bx, by, hx, hy):
    exact = float(segment_box_distance(ax, ay, bx, by, hx, hy))
    brute = _brute_segment_box(ax, ay, bx, by, hx, hy)
    seg_len = np.hypot(bx - ax, by - ay)
    assert exact <= brute + 1e-9
    assert exact >= brute - seg_len / 4000 - 1e-9


def test_box_sdf_signs():
    assert box_sdf(3.0, 0.0, 1.0, 1.0) == 2.0
    assert box_sdf(0.0, 0.0, 1.0, 2.0) == -1.0
    assert np.isclose(box_sdf(2.0, 2.0, 1.0, 1.0), np.sqrt(2))


def test_disc_distance():
    assert np.isclose(segment_disc_distance(0.0, -1.0, 0.0, 1.0, 5.0, 0.0, 0.5), 4.5)
    assert segment_disc_distance(0.0, -1.0, 0.0, 1.0, 0.1, 0.9, 0.3) < 0


def _signals(obj_x, obj_y, half_len=2.25, half_wid=0.9, radius=0.0, disc=False, heading=0.0):
    ego_len, ego_wid = 4.5, 1.8
    bumper = bumper_segment(0.0, 0.0, heading, ego_len, ego_wid)
    d = bumper_distance(bumper, obj_x, obj_y, 0.0, half_len, half_wid, radius, disc)
    f = in_corridor(0.0, 0.0, heading, ego_len, 30.0, 0.9 + 0.3, obj_x, obj_y, 0.0, half_len, half_wid, radius, disc)
    return float(d), bool(f)


def test_object_dead_ahead():
    # bumper at x = 2.25; nearest face of the object at 2.25 + 10
    d, f = _signals(2.25 + 10 + 2.25, 0.0)
    assert np.isclose(d, 10.0) and f


def test_object_beside_is_outside_corridor():
    d, f = _signals(10.0, 1.2 + 0.9 + 0.01)
    assert not f and d > 0
    _, f = _signals(10.0, 1.2 + 0.9 - 0.01)
    assert f


def test_overlap_is_negative():
    d, _ = _signals(2.25 + 2.0, 0.0)
    assert d < 0
    d, f = _signals(2.5, 0.0, radius=0.3, disc=True)
    assert d < 0 and f


def test_corridor_length_limit_and_behind():
    _, f = _signals(2.25 + 30 + 2.25 + 0.01, 0.0)
    assert not f
    _, f = _signals(-10.0, 0.0)
    assert not f


def test_rotated_ego_sees_object_on_its_heading():
    h = np.pi / 2
    ego_len, ego_wid = 4.5, 1.8
    bumper = bumper_segment(0.0, 0.0, h, ego_len, ego_wid)
    d = bumper_distance(bumper, 0.0, 12.25, 0.0, 0.3, 0.3, 0.3, True)
    f = in_corridor(0.0, 0.0, h, ego_len, 30.0, 1.2, 0.0, 12.25, 0.0, 0, 0, 0.3, True)
    assert np.isclose(d, 10.0 - 0.3) and f


def test_broadcasting_over_trace_and_objects():
    ex = np.zeros((5, 1))
    bumper = bumper_segment(ex, ex, ex, 4.5, 1.8)
    ox = np.tile(np.array([10.0, 20.0, 30.0]), (5, 1))
    d = bumper_distance(bumper, ox, 0 * ox, 0 * ox, 1.0, 1.0, 0.3, np.array([False, True, False]))
    assert d.shape == (5, 3)
