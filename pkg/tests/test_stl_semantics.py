import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import formula_trace
from falsitav.stl import (
    TRUE,
    Always,
    Eventually,
    Interval,
    Next,
    Not,
    Predicate,
    Until,
    desugar,
    eval_boolean,
    parse_formula,
    robustness,
    robustness_signal,
)
from falsitav.trace import Trace
from randgen import random_trace

T3 = [0.0, 1.0, 2.0]


def test_constant_always():
    assert robustness(parse_formula("always (x >= 0)"), Trace(T3, {"x": [5, 5, 5]})) == 5


def test_bounded_eventually():
    assert robustness(parse_formula("eventually_[0,2] (x >= 3)"), Trace(T3, {"x": [1, 4, 2]})) == 1


def test_next_past_end_is_minus_infinity():
    assert robustness(Next(Predicate.make({"x": 1})), Trace([0.0], {"x": [1.0]})) == -math.inf


def test_until_worked_example():
    t = Trace(T3, {"x": [1, 2, -1], "y": [-5, -5, 4]})
    assert robustness(parse_formula("(x >= 0) until_[0,10] (y >= 0)"), t) == 1


def test_true_and_false_leaves():
    t = Trace([0.0], {"x": [0.0]})
    assert robustness(TRUE, t) == math.inf
    assert robustness(Not(TRUE), t) == -math.inf


def test_empty_window_is_minus_infinity():
    t = Trace(T3, {"x": [1, 1, 1]})
    assert robustness(Eventually(Predicate.make({"x": 1}), Interval(5, 6)), t) == -math.inf
    assert robustness(Always(Predicate.make({"x": 1}), Interval(5, 6)), t) == math.inf


def test_boolean_examples():
    phi = parse_formula("always (x >= 0)")
    assert eval_boolean(phi, Trace(T3, {"x": [5, 5, 5]}))
    assert not eval_boolean(phi, Trace(T3, {"x": [5, -1, 5]}))


def test_strict_and_nonstrict_differ_only_at_zero():
    t = Trace([0.0], {"x": [0.0]})
    assert robustness(parse_formula("x > 0"), t) == robustness(parse_formula("x >= 0"), t) == 0
    assert eval_boolean(parse_formula("x >= 0"), t) and not eval_boolean(parse_formula("x > 0"), t)


def test_interval_uses_timestamps_not_indices():
    t = Trace([0.0, 0.5, 3.0], {"x": [-1.0, 7.0, 2.0]})
    assert robustness(parse_formula("eventually_[1,4] (x >= 0)"), t) == 2.0


def test_robustness_at_later_index():
    t = Trace(T3, {"x": [-4, 3, 1]})
    phi = parse_formula("always (x >= 0)")
    assert [robustness(phi, t, i) for i in range(3)] == [-4, 1, 1]
    assert list(robustness_signal(phi, t)) == [-4, 1, 1]


@given(formula_trace())
def test_sign_agrees_with_boolean(pair):
    phi, tr = pair
    r = robustness(phi, tr, 0)
    if r != 0:
        assert (r > 0) == eval_boolean(phi, tr, 0)


@given(formula_trace())
def test_negation_duality_exact(pair):
    phi, tr = pair
    assert robustness(Not(phi), tr) == -robustness(phi, tr)


@given(formula_trace())
def test_desugared_tree_evaluates_identically(pair):
    phi, tr = pair
    assert np.array_equal(robustness_signal(desugar(phi), tr), robustness_signal(phi, tr))


@given(formula_trace(depth=3))
def test_derived_operator_rewrites(pair):
    phi, tr = pair
    iv = Interval(0.5, 3.0)
    ev, alw = Eventually(phi, iv), Always(phi, iv)
    assert desugar(ev) == Until(TRUE, desugar(phi), iv)
    assert desugar(alw) == Not(Until(TRUE, Not(desugar(phi)), iv))
    assert np.array_equal(robustness_signal(Until(TRUE, phi, iv), tr), robustness_signal(ev, tr))
    assert np.array_equal(robustness_signal(alw, tr), robustness_signal(Not(Eventually(Not(phi), iv)), tr))


@given(formula_trace())
def test_deterministic(pair):
    phi, tr = pair
    a, b = robustness_signal(phi, tr), robustness_signal(phi, tr)
    assert a.tobytes() == b.tobytes()


def _single_signal_formula(rng: random.Random, depth: int):
    if depth <= 1 or rng.random() < 0.3:
        return Predicate.make({"x": rng.choice([-1.0, 1.0])}, rng.choice([-2.0, -1.0, 0.0, 1.0, 2.0]))
    d = depth - 1
    kind = rng.randrange(5)
    if kind == 0:
        return _single_signal_formula(rng, d) | _single_signal_formula(rng, d)
    if kind == 1:
        return _single_signal_formula(rng, d) & _single_signal_formula(rng, d)
    if kind == 2:
        return Always(_single_signal_formula(rng, d), Interval(0, rng.choice([1.0, 2.0, math.inf])))
    if kind == 3:
        return Eventually(_single_signal_formula(rng, d), Interval(0, rng.choice([1.0, 2.0, math.inf])))
    return Until(_single_signal_formula(rng, d), _single_signal_formula(rng, d), Interval(0, 3))


@given(st.integers(0, 2**32 - 1), st.floats(-1, 1))
def test_perturbation_within_radius_keeps_verdict(seed, direction):
    rng = random.Random(seed)
    phi = _single_signal_formula(rng, 4)
    tr = random_trace(rng, 20, signals=("x",))
    r = robustness(phi, tr)
    if not math.isfinite(r) or r == 0:
        return
    delta = 0.99 * abs(r) * (1 if direction >= 0 else -1)
    moved = Trace(tr.times, {"x": tr.signals["x"] + delta})
    assert eval_boolean(phi, moved) == eval_boolean(phi, tr)
    per_sample = Trace(tr.times, {"x": tr.signals["x"] + delta * np.cos(np.arange(len(tr)))})
    assert eval_boolean(phi, per_sample) == eval_boolean(phi, tr)


def test_missing_signal_raises():
    from falsitav.trace import UnknownSignalError

    with pytest.raises(UnknownSignalError):
        robustness(parse_formula("y >= 0"), Trace([0.0], {"x": [1.0]}))
