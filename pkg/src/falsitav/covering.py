"""Mixed-level t-way covering arrays.

Generation is AETG-style greedy: rows are added one at a time, each the best
of ``candidates`` randomised rows. Uncovered combinations are tracked in one
boolean array per t-subset of parameters (indexed by the mixed-radix level
assignment), which is the dense bitset over (subset, assignment).

:func:`verify_coverage` re-derives coverage from scratch with plain set
enumeration and shares no state with the generator.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

MAX_ROWS = 10**6


class CoveringArrayError(ValueError):
    pass


@dataclass(frozen=True)
class CoveringArray:
    strength: int
    domains: tuple[int, ...]
    rows: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def k(self) -> int:
        return len(self.domains)


def _check(t: int, domains: Sequence[int], min_levels: int = 1) -> None:
    if not domains:
        raise CoveringArrayError("need at least one parameter")
    if not 1 <= t <= len(domains):
        raise CoveringArrayError(f"strength {t} out of range 1..{len(domains)}")
    if any(int(v) != v or v < min_levels for v in domains):
        raise CoveringArrayError(f"every domain needs at least {min_levels} levels: {list(domains)}")


def count_t_way_combinations(t: int, domains: Sequence[int]) -> int:
    """Number of (t-subset, level assignment) pairs to be covered."""
    _check(t, domains)
    return sum(math.prod(domains[i] for i in s) for s in itertools.combinations(range(len(domains)), t))


def verify_coverage(ca: CoveringArray) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Every uncovered ``(parameter subset, levels)`` pair; empty means covered."""
    missing = []
    for row in ca.rows:
        if len(row) != ca.k or any(not 0 <= x < v for x, v in zip(row, ca.domains)):
            raise CoveringArrayError(f"row {row} does not fit domains {ca.domains}")
    for subset in itertools.combinations(range(ca.k), ca.strength):
        seen = {tuple(row[i] for i in subset) for row in ca.rows}
        for levels in itertools.product(*(range(ca.domains[i]) for i in subset)):
            if levels not in seen:
                missing.append((subset, levels))
    return missing


class _Coverage:
    """Uncovered-combination bookkeeping for the greedy generator."""

    def __init__(self, t: int, domains: Sequence[int]):
        self.t = t
        self.domains = tuple(domains)
        self.subsets = list(itertools.combinations(range(len(domains)), t))
        self.uncovered = [np.ones([domains[i] for i in s], dtype=bool) for s in self.subsets]
        self.remaining = sum(u.size for u in self.uncovered)
        self.by_param: list[list[int]] = [[] for _ in domains]
        for si, s in enumerate(self.subsets):
            for p in s:
                self.by_param[p].append(si)

    def param_counts(self) -> np.ndarray:
        counts = np.zeros(len(self.domains), dtype=np.int64)
        for s, u in zip(self.subsets, self.uncovered):
            n = int(u.sum())
            for p in s:
                counts[p] += n
        return counts

    def level_scores(self, p: int, row: list[int | None]) -> np.ndarray:
        """Uncovered combinations gained per level of ``p`` given the fixed entries of ``row``.

        With nothing else fixed, counts all uncovered combinations involving
        each level of ``p`` (used to seed a candidate).
        """
        scores = np.zeros(self.domains[p], dtype=np.int64)
        any_fixed = any(x is not None for i, x in enumerate(row) if i != p)
        for si in self.by_param[p]:
            s = self.subsets[si]
            u = self.uncovered[si]
            if any_fixed:
                if any(row[q] is None for q in s if q != p):
                    continue
                idx = tuple(slice(None) if q == p else row[q] for q in s)
                scores += u[idx]
            else:
                axis = s.index(p)
                other = tuple(a for a in range(len(s)) if a != axis)
                scores += u.sum(axis=other) if other else u
        return scores

    def gain(self, row: Sequence[int]) -> int:
        return sum(int(u[tuple(row[q] for q in s)]) for s, u in zip(self.subsets, self.uncovered))

    def add(self, row: Sequence[int]) -> None:
        for s, u in zip(self.subsets, self.uncovered):
            idx = tuple(row[q] for q in s)
            if u[idx]:
                u[idx] = False
                self.remaining -= 1


def _pick(scores: np.ndarray, rng: np.random.Generator) -> int:
    best = np.flatnonzero(scores == scores.max())
    return int(best[rng.integers(len(best))]) if len(best) > 1 else int(best[0])


def _candidate(cov: _Coverage, counts: np.ndarray, rng: np.random.Generator) -> list[int]:
    k = len(cov.domains)
    # parameters by remaining-uncovered count, descending; random tie-break
    order = sorted(range(k), key=lambda p: (-counts[p], rng.random()))
    row: list[int | None] = [None] * k
    for p in order:
        row[p] = _pick(cov.level_scores(p, row), rng)
    return row  # type: ignore[return-value]


def generate(t: int, domains: Sequence[int], seed: int = 0, candidates: int = 50) -> CoveringArray:
    """Greedy strength-``t`` covering array over mixed-level ``domains``."""
    _check(t, domains, min_levels=2)
    domains = tuple(int(v) for v in domains)
    if t == len(domains):
        rows = tuple(itertools.product(*(range(v) for v in domains)))
        return CoveringArray(t, domains, rows)
    cov = _Coverage(t, domains)
    root = np.random.SeedSequence(seed)
    rows = []
    while cov.remaining > 0:
        if len(rows) >= MAX_ROWS:
            raise RuntimeError("covering array generation exceeded the row cap")
        counts = cov.param_counts()
        streams = np.random.SeedSequence(root.entropy, spawn_key=(len(rows),)).spawn(candidates)
        best_row, best_gain = None, -1
        for ss in streams:
            row = _candidate(cov, counts, np.random.default_rng(ss))
            g = cov.gain(row)
            if g > best_gain:
                best_row, best_gain = row, g
        cov.add(best_row)
        rows.append(tuple(best_row))
    return CoveringArray(t, domains, tuple(rows))


def write_ca_csv(ca: CoveringArray, dest) -> None:
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            write_ca_csv(ca, fh)
        return
    w = csv.writer(dest, lineterminator="\n")
    w.writerow([f"p{i + 1}" for i in range(ca.k)])
    w.writerows(ca.rows)


def read_ca_csv(src, strength: int, domains: Sequence[int] | None = None) -> CoveringArray:
    """Read a CA file. Without ``domains`` the sizes are inferred as max level + 1."""
    if isinstance(src, (str, Path)):
        with open(src, newline="") as fh:
            return read_ca_csv(fh, strength, domains)
    rows = [r for r in csv.reader(src) if r]
    if not rows:
        raise CoveringArrayError("empty covering array file")
    body = tuple(tuple(int(x) for x in r) for r in rows[1:])
    k = len(rows[0])
    if domains is None:
        domains = tuple(max((r[i] for r in body), default=0) + 1 for i in range(k))
    _check(strength, domains)
    return CoveringArray(strength, tuple(domains), body)
