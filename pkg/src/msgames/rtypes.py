"""Complete atomic types, matrix decomposition and replication analysis."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .evaluation import holds
from .formulas import (EQ, And, Atom, Const, Exists, Forall, Formula, Not, Or, Var, conj,
                       constants_of, is_prenex, split_prenex, substitute)
from .structures import Schema, Structure


def _term_key(t):
    # variables first (by index), then constants in schema order handled by caller
    return (0, t.index) if isinstance(t, Var) else (1, t.name)


def atom_universe(schema: Schema, r: int) -> tuple[Atom, ...]:
    """All atomic formulas over x1..xr and the schema constants, in a fixed order."""
    vs = [Var(i) for i in range(1, r + 1)]
    cs = [Const(c) for c in schema.constants]
    atoms = [Atom(EQ, (vs[i], vs[j])) for i in range(r) for j in range(i + 1, r)]
    atoms += [Atom(EQ, (c, v)) for c in cs for v in vs]
    atoms += [Atom(EQ, (cs[i], cs[j])) for i in range(len(cs)) for j in range(i + 1, len(cs))]
    terms = vs + cs
    for name, arity in schema.relations:
        atoms += [Atom(name, args) for args in product(terms, repeat=arity)]
    return tuple(atoms)


def _normalize_eq(schema: Schema, a, b):
    """Orient an equality the way atom_universe lists it; None if trivially true."""
    if a == b:
        return None
    order = {Const(c): i for i, c in enumerate(schema.constants)}
    if isinstance(a, Var) and isinstance(b, Var):
        return Atom(EQ, (a, b) if a.index < b.index else (b, a))
    if isinstance(a, Const) and isinstance(b, Const):
        return Atom(EQ, (a, b) if order[a] < order[b] else (b, a))
    if isinstance(a, Var):
        a, b = b, a
    return Atom(EQ, (a, b))


@dataclass(frozen=True)
class RType:
    schema: Schema
    r: int
    positive: frozenset

    def atoms(self) -> tuple[Atom, ...]:
        return atom_universe(self.schema, self.r)

    def polarity(self, atom: Atom) -> bool:
        if atom.pred == EQ:
            norm = _normalize_eq(self.schema, *atom.args)
            if norm is None:
                return True
            return norm in self.positive
        return atom in self.positive

    def equalities(self) -> list[Atom]:
        return sorted((a for a in self.positive if a.pred == EQ), key=lambda a: tuple(map(_term_key, a.args)))

    def to_formula(self) -> Formula:
        lits = [a if a in self.positive else Not(a) for a in self.atoms()]
        if not lits:
            return Atom(EQ, (Var(1), Var(1))) if self.r else None
        return conj(*lits)

    def describe(self) -> str:
        from .formulas import print_formula
        pos = [print_formula(a) for a in self.atoms() if a in self.positive]
        return " & ".join(pos) if pos else "(no positive atoms)"


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, a):
        self.parent.setdefault(a, a)
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        self.parent[self.find(a)] = self.find(b)


def is_consistent(schema: Schema, r: int, positive: frozenset) -> bool:
    """Realizability of a polarity vector: equalities close up, relations respect them."""
    atoms = atom_universe(schema, r)
    uf = _UnionFind()
    for a in atoms:
        if a.pred == EQ and a in positive:
            uf.union(*a.args)
    for a in atoms:
        if a.pred == EQ and a not in positive and uf.find(a.args[0]) == uf.find(a.args[1]):
            return False
    seen = {}
    for a in atoms:
        if a.pred == EQ:
            continue
        key = (a.pred, tuple(uf.find(t) for t in a.args))
        pol = a in positive
        if seen.setdefault(key, pol) != pol:
            return False
    return True


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def enumerate_types(schema: Schema, r: int) -> list[RType]:
    """All consistent r-types, built from equality partitions of the terms."""
    if r < 0:
        raise ValueError("r must be non-negative")
    terms = [Var(i) for i in range(1, r + 1)] + [Const(c) for c in schema.constants]
    atoms = atom_universe(schema, r)
    eq_atoms = [a for a in atoms if a.pred == EQ]
    rel_atoms = [a for a in atoms if a.pred != EQ]
    out = []
    for part in _set_partitions(terms):
        cls = {t: i for i, block in enumerate(part) for t in block}
        eqs = frozenset(a for a in eq_atoms if cls[a.args[0]] == cls[a.args[1]])
        slots = []
        for name, arity in schema.relations:
            slots += [(name, c) for c in product(range(len(part)), repeat=arity)]
        for bits in product((False, True), repeat=len(slots)):
            on = {s for s, b in zip(slots, bits) if b}
            rels = frozenset(a for a in rel_atoms if (a.pred, tuple(cls[t] for t in a.args)) in on)
            out.append(RType(schema, r, eqs | rels))
    return out


def type_of_tuple(s: Structure, tup: Sequence[int]) -> RType:
    r = len(tup)
    for e in tup:
        if not 0 <= e < s.size:
            raise ValueError(f"element {e} out of range")
    env = {i + 1: e for i, e in enumerate(tup)}
    pos = frozenset(a for a in atom_universe(s.schema, r) if holds(a, s, env))
    return RType(s.schema, r, pos)


def eval_under_type(f: Formula, t: RType) -> bool:
    if isinstance(f, Atom):
        return t.polarity(f)
    if isinstance(f, Not):
        return not eval_under_type(f.body, t)
    if isinstance(f, And):
        return eval_under_type(f.left, t) and eval_under_type(f.right, t)
    if isinstance(f, Or):
        return eval_under_type(f.left, t) or eval_under_type(f.right, t)
    raise ValueError("matrix must be quantifier-free")


def infer_schema(f: Formula) -> Schema:
    rels = {}

    def walk(g):
        if isinstance(g, Atom):
            if g.pred != EQ:
                rels.setdefault(g.pred, len(g.args))
        elif isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, (And, Or)):
            walk(g.left)
            walk(g.right)
        else:
            walk(g.body)

    walk(f)
    return Schema(tuple(sorted(rels.items())), tuple(sorted(constants_of(f))))


def standard_prenex(f: Formula):
    """Prefix quantifier classes and the matrix with the i-th quantified variable renamed to x_i."""
    if not is_prenex(f):
        raise ValueError("formula is not in prenex form")
    prefix, matrix = split_prenex(f)
    vs = [v for _, v in prefix]
    if len(set(vs)) != len(vs):
        raise ValueError("prenex prefix quantifies a variable twice")
    from .formulas import free_vars
    if not free_vars(matrix) <= set(vs):
        raise ValueError("matrix has variables outside the prefix")
    mapping = {v: i + 1 for i, v in enumerate(vs)}
    # simultaneous renaming via a detour through fresh indices
    top = max(vs + list(mapping.values()), default=0) + 1
    tmp = substitute(matrix, {v: top + i for v, i in mapping.items()})
    matrix = substitute(tmp, {top + i: i for i in mapping.values()})
    return [q for q, _ in prefix], matrix


# -- background theories for the order symbol ------------------------------

def _order_classes(t: RType):
    uf = _UnionFind()
    terms = [Var(i) for i in range(1, t.r + 1)] + [Const(c) for c in t.schema.constants]
    for term in terms:
        uf.find(term)
    for a in t.positive:
        if a.pred == EQ:
            uf.union(*a.args)
    classes = sorted({uf.find(term) for term in terms}, key=_term_key)
    less = {(uf.find(a.args[0]), uf.find(a.args[1])) for a in t.positive if a.pred == "<"}
    return classes, less


def _strict(classes, less):
    if any(a == b for a, b in less):
        return False
    return all((a, d) in less for a, b in less for c, d in less if b == c)


def _tree(classes, less):
    # elements above any given element form a chain
    for a in classes:
        up = [b for b in classes if (a, b) in less]
        for b in up:
            for c in up:
                if b != c and (b, c) not in less and (c, b) not in less:
                    return False
    return True


def _linear(classes, less):
    return all(a == b or (a, b) in less or (b, a) in less for a in classes for b in classes)


THEORIES = {
    "strict-order": lambda cl, le: _strict(cl, le),
    "tree-order": lambda cl, le: _strict(cl, le) and _tree(cl, le),
    "linear-order": lambda cl, le: _strict(cl, le) and _linear(cl, le),
}


def type_filter(theory, schema: Schema, r: int):
    """Predicate on RType for a background theory.

    theory is None (all consistent types), one of THEORIES, or an iterable of
    structures (types realized by some r-tuple in one of them).
    """
    if theory is None:
        return lambda t: True
    if isinstance(theory, str):
        if theory == "generic":
            return lambda t: True
        if theory not in THEORIES:
            raise ValueError(f"unknown theory {theory!r}")
        pred = THEORIES[theory]
        return lambda t: pred(*_order_classes(t))
    realized = set()
    for s in theory:
        for tup in product(range(s.size), repeat=r):
            realized.add(type_of_tuple(s, tup).positive)
    return lambda t: t.positive in realized


def matrix_types(psi: Formula, schema: Schema | None = None, theory=None) -> list[RType]:
    _, matrix = standard_prenex(psi)
    r = len(split_prenex(psi)[0])
    schema = schema or infer_schema(psi)
    keep = type_filter(theory, schema, r)
    return [t for t in enumerate_types(schema, r) if keep(t) and eval_under_type(matrix, t)]


NON_REPLICATING = "NonReplicating"
REPLICATING = "Replicating"


def type_is_non_replicating(quants: Sequence[type], t: RType) -> bool:
    for a in t.positive:
        if a.pred != EQ:
            continue
        u, v = a.args
        if isinstance(u, Var) and isinstance(v, Var):
            i, j = sorted((u.index, v.index))
            qi, qj = quants[i - 1], quants[j - 1]
            both_universal = qi is Forall and qj is Forall
            exists_first = qi is Exists and qj is Forall
            if not (both_universal or exists_first):
                return False
        elif isinstance(u, Var) or isinstance(v, Var):
            var = u if isinstance(u, Var) else v
            if quants[var.index - 1] is not Forall:
                return False
    return True


@dataclass
class Classification:
    verdict: str
    types: list  # list of (RType, verdict)

    @property
    def offending(self) -> list[RType]:
        return [t for t, v in self.types if v == REPLICATING]


def classify_types(quants: Sequence[type], types: Iterable[RType]) -> Classification:
    per = [(t, NON_REPLICATING if type_is_non_replicating(quants, t) else REPLICATING) for t in types]
    verdict = REPLICATING if any(v == REPLICATING for _, v in per) else NON_REPLICATING
    return Classification(verdict, per)


def classify_sentence(psi: Formula, schema: Schema | None = None, theory=None) -> Classification:
    quants, _ = standard_prenex(psi)
    return classify_types(quants, matrix_types(psi, schema, theory))
