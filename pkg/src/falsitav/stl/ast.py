"""Abstract syntax for STL formulas.

Core operators are True, Predicate, Not, Or, Next and Until; the remaining
node kinds are kept in the tree for readability and reduced to the core by
:func:`desugar`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

INF = math.inf


@dataclass(frozen=True)
class Interval:
    lo: float = 0.0
    hi: float = INF
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if math.isinf(self.hi):
            object.__setattr__(self, "hi_closed", False)
        if not (self.lo >= 0 and math.isfinite(self.lo)):
            raise ValueError(f"interval lower bound must be finite and >= 0, got {self.lo}")
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")
        if self.lo == self.hi and not (self.lo_closed and self.hi_closed):
            raise ValueError(f"empty interval at {self.lo}")

    def contains(self, d: float) -> bool:
        if d < self.lo or (d == self.lo and not self.lo_closed):
            return False
        if d > self.hi or (d == self.hi and not self.hi_closed):
            return False
        return True

    def __str__(self):
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        hi = "inf" if math.isinf(self.hi) else _num(self.hi)
        return f"{left}{_num(self.lo)},{hi}{right}"


UNBOUNDED = Interval()


def _num(x: float) -> str:
    return repr(float(x)) if x != int(x) else str(int(x))


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class TrueF(Formula):
    def __str__(self):
        return "true"


@dataclass(frozen=True)
class Predicate(Formula):
    """Affine margin ``sum(c * signal) + const  (>= | >)  0``.

    ``terms`` is a sorted tuple of ``(signal, coefficient)`` pairs with
    non-zero coefficients. Robustness is the margin itself.
    """

    terms: tuple[tuple[str, float], ...]
    const: float = 0.0
    strict: bool = False

    @classmethod
    def make(cls, coeffs: Mapping[str, float], const: float = 0.0, strict: bool = False):
        terms = tuple(sorted((k, float(v)) for k, v in coeffs.items() if v != 0))
        return cls(terms, float(const), strict)

    @property
    def signals(self) -> set[str]:
        return {name for name, _ in self.terms}

    def __str__(self):
        parts = []
        for name, c in self.terms:
            if c == 1:
                parts.append(f"+ {name}")
            elif c == -1:
                parts.append(f"- {name}")
            elif c < 0:
                parts.append(f"- {_num(-c)} * {name}")
            else:
                parts.append(f"+ {_num(c)} * {name}")
        if self.const or not parts:
            parts.append(f"- {_num(-self.const)}" if self.const < 0 else f"+ {_num(self.const)}")
        text = " ".join(parts)
        text = text[2:] if text.startswith("+ ") else "-" + text[2:]
        return f"{text} {'>' if self.strict else '>='} 0"


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def __str__(self):
        return f"not ({self.arg})"


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"({self.left}) or ({self.right})"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"({self.left}) and ({self.right})"


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"({self.left}) -> ({self.right})"


@dataclass(frozen=True)
class Next(Formula):
    arg: Formula

    def __str__(self):
        return f"next ({self.arg})"


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula
    interval: Interval = UNBOUNDED

    def __str__(self):
        return f"({self.left}) until_{self.interval} ({self.right})"


@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula
    interval: Interval = UNBOUNDED

    def __str__(self):
        return f"({self.left}) release_{self.interval} ({self.right})"


@dataclass(frozen=True)
class Eventually(Formula):
    arg: Formula
    interval: Interval = UNBOUNDED

    def __str__(self):
        return f"eventually_{self.interval} ({self.arg})"


@dataclass(frozen=True)
class Always(Formula):
    arg: Formula
    interval: Interval = UNBOUNDED

    def __str__(self):
        return f"always_{self.interval} ({self.arg})"


TRUE = TrueF()
FALSE = Not(TRUE)


def children(phi: Formula) -> tuple[Formula, ...]:
    if isinstance(phi, (TrueF, Predicate)):
        return ()
    if isinstance(phi, (Not, Next, Eventually, Always)):
        return (phi.arg,)
    return (phi.left, phi.right)


def signals_of(phi: Formula) -> set[str]:
    if isinstance(phi, Predicate):
        return phi.signals
    out: set[str] = set()
    for c in children(phi):
        out |= signals_of(c)
    return out


def depth(phi: Formula) -> int:
    return 1 + max((depth(c) for c in children(phi)), default=0)


def desugar(phi: Formula) -> Formula:
    """Rewrite derived operators into True / Predicate / Not / Or / Next / Until."""
    if isinstance(phi, (TrueF, Predicate)):
        return phi
    if isinstance(phi, Not):
        return Not(desugar(phi.arg))
    if isinstance(phi, Next):
        return Next(desugar(phi.arg))
    if isinstance(phi, Or):
        return Or(desugar(phi.left), desugar(phi.right))
    if isinstance(phi, Until):
        return Until(desugar(phi.left), desugar(phi.right), phi.interval)
    if isinstance(phi, And):
        return Not(Or(Not(desugar(phi.left)), Not(desugar(phi.right))))
    if isinstance(phi, Implies):
        return Or(Not(desugar(phi.left)), desugar(phi.right))
    if isinstance(phi, Eventually):
        return Until(TRUE, desugar(phi.arg), phi.interval)
    if isinstance(phi, Always):
        return Not(Until(TRUE, Not(desugar(phi.arg)), phi.interval))
    if isinstance(phi, Release):
        return Not(Until(Not(desugar(phi.left)), Not(desugar(phi.right)), phi.interval))
    raise TypeError(f"not a formula: {phi!r}")
