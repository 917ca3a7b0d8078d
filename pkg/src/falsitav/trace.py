"""Sampled traces, parameter spaces and parameter valuations.

A trace is a strictly time-ordered sequence of samples; every sample carries
the same set of named real signals. Traces are stored column-wise (one numpy
array per signal) because every consumer in this package reads whole signals.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np


class TraceError(ValueError):
    """Raised when a trace file or trace construction is invalid."""


class UnknownSignalError(KeyError):
    pass


class SampleIndexError(IndexError):
    pass


@dataclass(frozen=True)
class Sample:
    time: float
    values: Mapping[str, float]


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


class Trace:
    """Column-wise sampled trace.

    The constructor does not enforce the invariants so that malformed data
    can be inspected with :func:`validate_trace`; use :meth:`checked` or the
    CSV reader to get a validated trace.
    """

    __slots__ = ("times", "signals")

    def __init__(self, times: Sequence[float], signals: Mapping[str, Sequence[float]]):
        self.times = _frozen(times)
        self.signals = MappingProxyType({name: _frozen(vals) for name, vals in signals.items()})

    @classmethod
    def from_samples(cls, samples: Iterable[Sample]) -> "Trace":
        samples = list(samples)
        names = list(samples[0].values) if samples else []
        cols = {n: [s.values.get(n, math.nan) for s in samples] for n in names}
        return cls([s.time for s in samples], cols)

    def checked(self) -> "Trace":
        errors = validate_trace(self)
        if errors:
            raise TraceError("; ".join(errors))
        return self

    @property
    def signal_names(self) -> tuple[str, ...]:
        return tuple(self.signals)

    @property
    def samples(self) -> list[Sample]:
        return [
            Sample(float(t), {n: float(v[i]) for n, v in self.signals.items()})
            for i, t in enumerate(self.times)
        ]

    def __len__(self) -> int:
        return len(self.times)

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.signals[name]
        except KeyError:
            raise UnknownSignalError(name) from None

    def truncated(self, n: int) -> "Trace":
        """First ``n`` samples."""
        return Trace(self.times[:n], {k: v[:n] for k, v in self.signals.items()})

    def with_signals(self, extra: Mapping[str, Sequence[float]]) -> "Trace":
        cols = dict(self.signals)
        cols.update(extra)
        return Trace(self.times, cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trace):
            return NotImplemented
        return (
            self.signal_names == other.signal_names
            and np.array_equal(self.times, other.times)
            and all(np.array_equal(self.signals[n], other.signals[n]) for n in self.signals)
        )

    def __repr__(self) -> str:
        return f"Trace(n={len(self)}, signals={list(self.signals)})"

    def __reduce__(self):
        return Trace, (self.times, dict(self.signals))


def validate_trace(t: Trace) -> list[str]:
    """Return every invariant violation found in ``t`` (empty list when valid)."""
    errors = []
    n = len(t.times)
    if n == 0:
        errors.append("empty trace")
    for i, ti in enumerate(t.times):
        if not math.isfinite(ti) or ti < 0:
            errors.append(f"invalid time {ti!r} at index {i}")
        if i > 0 and not ti > t.times[i - 1]:
            errors.append(f"non-increasing time at index {i}")
    for name, vals in t.signals.items():
        if len(vals) != n:
            errors.append(f"signal {name!r} has {len(vals)} samples, expected {n}")
            continue
        for i in np.flatnonzero(~np.isfinite(vals)):
            if np.isnan(vals[i]):
                errors.append(f"missing or NaN value for signal {name!r} at index {i}")
            else:
                errors.append(f"non-finite value for signal {name!r} at index {i}")
    return errors


def signal_at(t: Trace, name: str, i: int) -> float:
    if name not in t.signals:
        raise UnknownSignalError(name)
    if not 0 <= i < len(t.times):
        raise SampleIndexError(f"index {i} out of range for trace of length {len(t.times)}")
    return float(t.signals[name][i])


# -- CSV ---------------------------------------------------------------------

def write_trace_csv(t: Trace, dest) -> None:
    """Write ``t`` as ``time,<sig1>,...``. Floats use repr so reading back is bit-exact."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            write_trace_csv(t, fh)
        return
    w = csv.writer(dest, lineterminator="\n")
    names = list(t.signals)
    w.writerow(["time", *names])
    cols = [t.times, *(t.signals[n] for n in names)]
    for row in zip(*cols):
        w.writerow([repr(float(x)) for x in row])


def trace_to_csv_text(t: Trace) -> str:
    buf = io.StringIO()
    write_trace_csv(t, buf)
    return buf.getvalue()


def read_trace_csv(src) -> Trace:
    if isinstance(src, (str, Path)):
        with open(src, newline="") as fh:
            return read_trace_csv(fh)
    rows = list(csv.reader(src))
    if not rows:
        raise TraceError("empty trace file")
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "time":
        raise TraceError("trace header must start with 'time'")
    if len(set(header)) != len(header):
        raise TraceError("duplicate column names in trace header")
    data = [r for r in rows[1:] if r]
    cols: list[list[float]] = [[] for _ in header]
    for lineno, row in enumerate(data, start=2):
        if len(row) != len(header):
            raise TraceError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        for c, cell in enumerate(row):
            try:
                cols[c].append(float(cell))
            except ValueError:
                raise TraceError(f"line {lineno}: bad number {cell!r}") from None
    trace = Trace(cols[0], dict(zip(header[1:], cols[1:])))
    return trace.checked()


# -- parameter spaces ------------------------------------------------------------

@dataclass(frozen=True)
class DiscreteParam:
    name: str
    levels: tuple

    @property
    def size(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class ContinuousParam:
    name: str
    lower: float
    upper: float

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class ParameterSpace:
    """Ordered mixed space: finite discrete domains followed by bounded intervals."""

    discrete: tuple[DiscreteParam, ...] = ()
    continuous: tuple[ContinuousParam, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "discrete", tuple(self.discrete))
        object.__setattr__(self, "continuous", tuple(self.continuous))
        names = [p.name for p in self.discrete] + [p.name for p in self.continuous]
        if len(set(names)) != len(names):
            raise ValueError("parameter names must be unique")
        for p in self.discrete:
            if p.size < 1:
                raise ValueError(f"discrete parameter {p.name!r} has an empty domain")
        for p in self.continuous:
            if not (math.isfinite(p.lower) and math.isfinite(p.upper) and p.lower < p.upper):
                raise ValueError(f"continuous parameter {p.name!r} needs finite lower < upper")

    @property
    def names(self) -> list[str]:
        return [p.name for p in self.discrete] + [p.name for p in self.continuous]

    @property
    def discrete_sizes(self) -> list[int]:
        return [p.size for p in self.discrete]

    def contains(self, val: "ParamValuation") -> bool:
        if set(val.discrete) != {p.name for p in self.discrete}:
            return False
        if set(val.continuous) != {p.name for p in self.continuous}:
            return False
        return all(0 <= val.discrete[p.name] < p.size for p in self.discrete) and all(
            p.lower <= val.continuous[p.name] <= p.upper for p in self.continuous
        )

    def to_json(self) -> dict:
        return {
            "discrete": [{"name": p.name, "levels": list(p.levels)} for p in self.discrete],
            "continuous": [
                {"name": p.name, "lower": p.lower, "upper": p.upper} for p in self.continuous
            ],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "ParameterSpace":
        return cls(
            tuple(DiscreteParam(d["name"], tuple(d["levels"])) for d in obj.get("discrete", [])),
            tuple(
                ContinuousParam(c["name"], float(c["lower"]), float(c["upper"]))
                for c in obj.get("continuous", [])
            ),
        )


def load_space(path) -> ParameterSpace:
    with open(path) as fh:
        return ParameterSpace.from_json(json.load(fh))


@dataclass(frozen=True)
class ParamValuation:
    """A point of a :class:`ParameterSpace` (level indices + real values)."""

    discrete: Mapping[str, int] = field(default_factory=dict)
    continuous: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "discrete", MappingProxyType(dict(self.discrete)))
        object.__setattr__(self, "continuous", MappingProxyType(dict(self.continuous)))

    def level(self, space: ParameterSpace, name: str):
        """Symbolic level of a discrete parameter."""
        for p in space.discrete:
            if p.name == name:
                return p.levels[self.discrete[name]]
        raise UnknownSignalError(name)

    def as_row(self, space: ParameterSpace) -> list:
        return [self.discrete[p.name] for p in space.discrete] + [
            self.continuous[p.name] for p in space.continuous
        ]

    def to_json(self) -> dict:
        return {"discrete": dict(self.discrete), "continuous": dict(self.continuous)}

    @classmethod
    def from_json(cls, obj: Mapping) -> "ParamValuation":
        return cls(
            {k: int(v) for k, v in obj.get("discrete", {}).items()},
            {k: float(v) for k, v in obj.get("continuous", {}).items()},
        )

    def __reduce__(self):
        return ParamValuation, (dict(self.discrete), dict(self.continuous))

    def __hash__(self):
        return hash((tuple(sorted(self.discrete.items())), tuple(sorted(self.continuous.items()))))

    def __eq__(self, other):
        if not isinstance(other, ParamValuation):
            return NotImplemented
        return dict(self.discrete) == dict(other.discrete) and dict(self.continuous) == dict(
            other.continuous
        )
