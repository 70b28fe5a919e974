"""Compositional syntactic measures and their bounded preimage enumerators."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .formulas import And, Atom, Exists, Forall, Formula, Not, Or


@dataclass(frozen=True)
class MeasureSpec:
    name: str
    h_not: Callable[[int], int]
    h_exists: Callable[[int], int]
    h_forall: Callable[[int], int]
    h_or: Callable[[int, int], int]
    h_and: Callable[[int, int], int]
    h_atomic: Callable[[Atom], int]
    inv_not: Callable[[int], list]
    inv_exists: Callable[[int], list]
    inv_forall: Callable[[int], list]
    inv_or: Callable[[int], list]
    inv_and: Callable[[int], list]
    # Largest quantifier rank of a formula whose measure is at most r, or None if unbounded.
    rank_bound: Callable[[int], int | None] = field(default=lambda r: None)
    # h_not is the identity and the dual helpers coincide, so negations can be
    # pushed to the atoms without changing the measure.
    self_dual: bool = False
    strict: dict = field(default_factory=dict)


def apply_measure(m: MeasureSpec, f: Formula) -> int:
    if isinstance(f, Atom):
        return m.h_atomic(f)
    if isinstance(f, Not):
        return m.h_not(apply_measure(m, f.body))
    if isinstance(f, Or):
        return m.h_or(apply_measure(m, f.left), apply_measure(m, f.right))
    if isinstance(f, And):
        return m.h_and(apply_measure(m, f.left), apply_measure(m, f.right))
    if isinstance(f, Exists):
        return m.h_exists(apply_measure(m, f.body))
    return m.h_forall(apply_measure(m, f.body))


def _pred(r):
    return [r - 1] if r >= 1 else []


def _same(r):
    return [r]


def _sum_pairs(r):
    return [(i, r - i) for i in range(r + 1)]


def _max_pairs(r):
    out = [(i, r) for i in range(r + 1)]
    out += [(r, j) for j in range(r)]
    return sorted(out)


def _size_pairs(r):
    return [(i, r - 1 - i) for i in range(1, r - 1)]


F_Q = MeasureSpec(
    name="qcount",
    h_not=lambda n: n,
    h_exists=lambda n: n + 1,
    h_forall=lambda n: n + 1,
    h_or=lambda a, b: a + b,
    h_and=lambda a, b: a + b,
    h_atomic=lambda a: 0,
    inv_not=_same,
    inv_exists=_pred,
    inv_forall=_pred,
    inv_or=_sum_pairs,
    inv_and=_sum_pairs,
    rank_bound=lambda r: r,
    self_dual=True,
    strict={"not": False, "exists": True, "forall": True, "or": False, "and": False},
)

F_R = MeasureSpec(
    name="qrank",
    h_not=lambda n: n,
    h_exists=lambda n: n + 1,
    h_forall=lambda n: n + 1,
    h_or=max,
    h_and=max,
    h_atomic=lambda a: 0,
    inv_not=_same,
    inv_exists=_pred,
    inv_forall=_pred,
    inv_or=_max_pairs,
    inv_and=_max_pairs,
    rank_bound=lambda r: r,
    self_dual=True,
    strict={"not": False, "exists": True, "forall": True, "or": False, "and": False},
)

F_S = MeasureSpec(
    name="fsize",
    h_not=lambda n: n + 1,
    h_exists=lambda n: n + 1,
    h_forall=lambda n: n + 1,
    h_or=lambda a, b: a + b + 1,
    h_and=lambda a, b: a + b + 1,
    h_atomic=lambda a: 1,
    inv_not=_pred,
    inv_exists=_pred,
    inv_forall=_pred,
    inv_or=_size_pairs,
    inv_and=_size_pairs,
    rank_bound=lambda r: max(r - 1, 0),
    self_dual=False,
    strict={"not": True, "exists": True, "forall": True, "or": True, "and": True},
)

# The always-zero measure; used only through the pebble-game correspondence.
F_T = MeasureSpec(
    name="zero",
    h_not=lambda n: 0,
    h_exists=lambda n: 0,
    h_forall=lambda n: 0,
    h_or=lambda a, b: 0,
    h_and=lambda a, b: 0,
    h_atomic=lambda a: 0,
    inv_not=lambda r: [0] if r == 0 else [],
    inv_exists=lambda r: [0] if r == 0 else [],
    inv_forall=lambda r: [0] if r == 0 else [],
    inv_or=lambda r: [(0, 0)] if r == 0 else [],
    inv_and=lambda r: [(0, 0)] if r == 0 else [],
    strict={"not": False, "exists": False, "forall": False, "or": False, "and": False},
)

MEASURES = {m.name: m for m in (F_Q, F_R, F_S)}


def measure_by_name(name: str) -> MeasureSpec:
    aliases = {"f_q": "qcount", "f_r": "qrank", "f_s": "fsize", "q": "qcount", "r": "qrank", "s": "fsize"}
    key = aliases.get(name, name)
    if key not in MEASURES:
        raise ValueError(f"unknown measure {name!r}; choose from {sorted(MEASURES)}")
    return MEASURES[key]
