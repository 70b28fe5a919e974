"""Tarskian evaluation of formulas on pebbled structures."""

from __future__ import annotations

from typing import Iterable

from .formulas import EQ, And, Atom, Const, Exists, Forall, Formula, Not, Or, Var, free_vars
from .structures import PebbledStructure, Structure


class UnboundVariableError(ValueError):
    def __init__(self, index: int):
        super().__init__(f"variable x{index} is free but not assigned")
        self.index = index


class DomainError(ValueError):
    pass


def _term_value(s: Structure, env: dict, t):
    if isinstance(t, Var):
        try:
            return env[t.index]
        except KeyError:
            raise UnboundVariableError(t.index) from None
    if isinstance(t, Const):
        try:
            return s.constants[s.schema.constants.index(t.name)]
        except ValueError:
            raise ValueError(f"unknown constant {t.name!r}") from None
    raise TypeError(f"not a term: {t!r}")


def holds(f: Formula, s: Structure, env: dict) -> bool:
    """Truth of f in s under the variable environment env (index -> element)."""
    if isinstance(f, Atom):
        vals = tuple(_term_value(s, env, t) for t in f.args)
        if f.pred == EQ:
            return vals[0] == vals[1]
        try:
            return vals in s.relation(f.pred)
        except KeyError:
            raise ValueError(f"unknown relation {f.pred!r}") from None
    if isinstance(f, Not):
        return not holds(f.body, s, env)
    if isinstance(f, And):
        return holds(f.left, s, env) and holds(f.right, s, env)
    if isinstance(f, Or):
        return holds(f.left, s, env) or holds(f.right, s, env)
    saved = env.get(f.var, None)
    had = f.var in env
    want = isinstance(f, Exists)
    result = not want
    for e in range(s.size):
        env[f.var] = e
        if holds(f.body, s, env) == want:
            result = want
            break
    if had:
        env[f.var] = saved
    else:
        del env[f.var]
    return result


def evaluate(f: Formula, p: PebbledStructure | Structure) -> bool:
    if isinstance(p, Structure):
        p = PebbledStructure(p)
    missing = free_vars(f) - p.colors
    if missing:
        raise UnboundVariableError(min(missing))
    return holds(f, p.structure, p.as_dict())


def _as_pebbled(items) -> list[PebbledStructure]:
    return [PebbledStructure(p) if isinstance(p, Structure) else p for p in items]


def check_domain_consistent(A: Iterable, B: Iterable) -> frozenset:
    items = _as_pebbled(A) + _as_pebbled(B)
    domains = {p.colors for p in items}
    if len(domains) > 1:
        raise DomainError("structure-assignment pairs do not share a common domain")
    return next(iter(domains), frozenset())


def is_separating(f: Formula, A: Iterable, B: Iterable) -> bool:
    A, B = _as_pebbled(A), _as_pebbled(B)
    dom = check_domain_consistent(A, B)
    if not free_vars(f) <= dom:
        raise UnboundVariableError(min(free_vars(f) - dom))
    return all(evaluate(f, p) for p in A) and not any(evaluate(f, p) for p in B)


def separation_failure(f: Formula, A: Iterable, B: Iterable):
    """First structure violating separation, as (side, item), or None."""
    for p in _as_pebbled(A):
        if not evaluate(f, p):
            return "left", p
    for p in _as_pebbled(B):
        if evaluate(f, p):
            return "right", p
    return None
