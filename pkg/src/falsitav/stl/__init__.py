"""Signal temporal logic: syntax, parser, robust and Boolean semantics."""
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
    TrueF,
    Until,
    depth,
    desugar,
    signals_of,
)
from .parser import STLSyntaxError, UnknownSignalInFormula, parse_formula
from .semantics import eval_boolean, robustness, robustness_signal

__all__ = [
    "FALSE", "TRUE", "UNBOUNDED", "Always", "And", "Eventually", "Formula", "Implies",
    "Interval", "Next", "Not", "Or", "Predicate", "Release", "TrueF", "Until", "depth",
    "desugar", "signals_of", "STLSyntaxError", "UnknownSignalInFormula", "parse_formula",
    "eval_boolean", "robustness", "robustness_signal",
]
