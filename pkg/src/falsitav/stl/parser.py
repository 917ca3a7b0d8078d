"""Recursive-descent parser for the textual STL syntax.

Grammar, lowest precedence first::

    formula  := disj ( '->' formula )?                  right associative
    disj     := conj ( 'or' conj )*
    conj     := unary ( ('and' | until_I | release_I) unary )*
    unary    := ('not' | 'next' | eventually_I | always_I) unary | atom
    atom     := 'true' | 'false' | comparison | '(' formula ')'
    comparison := affine ('>=' | '>' | '<=' | '<') affine
    affine   := ['-'] term (('+' | '-') term)*
    term     := number ['*' name] | name ['*' number]

Intervals attach with an underscore: ``always_[2,inf)``, ``eventually_(0,5]``.
A temporal operator without an interval ranges over ``[0, inf)``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable

from .ast import (
    FALSE,
    TRUE,
    UNBOUNDED,
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
    Until,
)


class STLSyntaxError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at offset {position}")


class UnknownSignalInFormula(ValueError):
    def __init__(self, name: str, position: int):
        self.name = name
        self.position = position
        super().__init__(f"unknown signal {name!r} at offset {position}")


KEYWORDS = {"not", "and", "or", "next", "true", "false", "inf"}
TEMPORAL = {"eventually", "always", "until", "release"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<temporal>(?:eventually|always|until|release)(?:_(?=[\[(]))?(?![A-Za-z0-9_]))
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|>=|<=|>|<|\+|-|\*|\(|\)|\[|\]|,)
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    text: str
    pos: int
    interval: bool = False


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise STLSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        tok = m.group()
        if kind == "temporal":
            out.append(Token("temporal", tok.rstrip("_"), pos, interval=tok.endswith("_")))
        elif kind == "name" and tok in KEYWORDS:
            out.append(Token(tok, tok, pos))
        elif kind != "ws":
            out.append(Token(kind, tok, pos))
        pos = m.end()
    out.append(Token("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, declared: set[str] | None):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.declared = declared

    # helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise STLSyntaxError(f"{msg}, found {found}", tok.pos, self.text)

    def expect(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind == "eof":
            self.error(f"expected {text!r}")
        return self.advance()

    def is_op(self, *texts: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in texts

    # grammar
    def parse(self) -> Formula:
        phi = self.formula()
        if self.tok.kind != "eof":
            self.error("unexpected token")
        return phi

    def formula(self) -> Formula:
        left = self.disj()
        if self.is_op("->"):
            self.advance()
            return Implies(left, self.formula())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.tok.kind == "or":
            self.advance()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while True:
            t = self.tok
            if t.kind == "and":
                self.advance()
                left = And(left, self.unary())
            elif t.kind == "temporal" and t.text in ("until", "release"):
                self.advance()
                interval = self.interval(t)
                right = self.unary()
                node = Until if t.text == "until" else Release
                left = node(left, right, interval)
            else:
                return left

    def unary(self) -> Formula:
        t = self.tok
        if t.kind == "not":
            self.advance()
            return Not(self.unary())
        if t.kind == "next":
            self.advance()
            return Next(self.unary())
        if t.kind == "temporal" and t.text in ("eventually", "always"):
            self.advance()
            interval = self.interval(t)
            arg = self.unary()
            return Eventually(arg, interval) if t.text == "eventually" else Always(arg, interval)
        if t.kind == "temporal":
            self.error("binary temporal operator without left operand")
        return self.atom()

    def interval(self, op: Token) -> Interval:
        if not op.interval:
            return UNBOUNDED
        start = self.tok
        if not self.is_op("[", "("):
            self.error("expected '[' or '('")
        lo_closed = self.advance().text == "["
        lo = self.number()
        self.expect(",")
        if self.tok.kind == "inf":
            self.advance()
            hi = math.inf
        else:
            hi = self.number()
        if not self.is_op("]", ")"):
            self.error("expected ']' or ')'")
        hi_closed = self.advance().text == "]"
        try:
            return Interval(lo, hi, lo_closed, hi_closed)
        except ValueError as exc:
            raise STLSyntaxError(str(exc), start.pos, self.text) from None

    def number(self) -> float:
        sign = 1.0
        if self.is_op("-"):
            self.advance()
            sign = -1.0
        if self.tok.kind == "inf":
            self.advance()
            return sign * math.inf
        if self.tok.kind != "num":
            self.error("expected a number")
        return sign * float(self.advance().text)

    def atom(self) -> Formula:
        t = self.tok
        if t.kind == "true":
            self.advance()
            return TRUE
        if t.kind == "false":
            self.advance()
            return FALSE
        if self.is_op("("):
            save = self.i
            try:
                return self.comparison()
            except STLSyntaxError as arith_err:
                self.i = save
                self.advance()
                try:
                    inner = self.formula()
                    self.expect(")")
                except STLSyntaxError as formula_err:
                    # report whichever attempt got further
                    raise max(arith_err, formula_err, key=lambda e: e.position) from None
                return inner
        return self.comparison()

    def comparison(self) -> Formula:
        lhs, lc = self.affine()
        if not self.is_op(">=", ">", "<=", "<"):
            self.error("expected comparison operator")
        rel = self.advance().text
        rhs, rc = self.affine()
        # normalise to  expr (>= | >) 0
        if rel in (">=", ">"):
            coeffs = _combine(lhs, rhs, -1.0)
            const = lc - rc
        else:
            coeffs = _combine(rhs, lhs, -1.0)
            const = rc - lc
        return Predicate.make(coeffs, const, strict=rel in (">", "<"))

    def affine(self) -> tuple[dict[str, float], float]:
        coeffs: dict[str, float] = {}
        const = 0.0
        sign = 1.0
        if self.is_op("-"):
            self.advance()
            sign = -1.0
        elif self.is_op("+"):
            self.advance()
        while True:
            if self.is_op("("):
                self.advance()
                inner, ic = self.affine()
                self.expect(")")
                for k, v in inner.items():
                    coeffs[k] = coeffs.get(k, 0.0) + sign * v
                const += sign * ic
            else:
                name, c = self.term()
                if name is None:
                    const += sign * c
                else:
                    coeffs[name] = coeffs.get(name, 0.0) + sign * c
            if self.is_op("+", "-"):
                sign = 1.0 if self.advance().text == "+" else -1.0
            else:
                return coeffs, const

    def term(self) -> tuple[str | None, float]:
        t = self.tok
        if t.kind in ("num", "inf"):
            c = float(self.advance().text)
            if self.is_op("*"):
                self.advance()
                return self.signal_name(), c
            return None, c
        if t.kind == "name":
            name = self.signal_name()
            if self.is_op("*"):
                self.advance()
                if self.tok.kind != "num":
                    self.error("expected a number")
                return name, float(self.advance().text)
            return name, 1.0
        self.error("expected a signal name or number")

    def signal_name(self) -> str:
        t = self.tok
        if t.kind != "name":
            self.error("expected a signal name")
        self.advance()
        if self.declared is not None and t.text not in self.declared:
            raise UnknownSignalInFormula(t.text, t.pos)
        return t.text


def _combine(pos: dict[str, float], neg: dict[str, float], k: float) -> dict[str, float]:
    out = dict(pos)
    for name, c in neg.items():
        out[name] = out.get(name, 0.0) + k * c
    return out


def parse_formula(text: str, declared_signals: Iterable[str] | None = None) -> Formula:
    """Parse ``text`` into a :class:`Formula`.

    When ``declared_signals`` is given, references to any other signal name
    raise :class:`UnknownSignalInFormula`.
    """
    declared = None if declared_signals is None else set(declared_signals)
    return _Parser(text, declared).parse()
