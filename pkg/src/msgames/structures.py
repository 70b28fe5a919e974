"""Finite relational structures, pebbled structures and game configurations."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _valid_name(name: str) -> bool:
    # "<" is allowed so the usual order relation can keep its symbol.
    return name == "<" or bool(_IDENT.match(name))


@dataclass(frozen=True)
class Schema:
    relations: tuple[tuple[str, int], ...] = ()
    constants: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple((str(n), int(a)) for n, a in self.relations))
        object.__setattr__(self, "constants", tuple(self.constants))
        names = [n for n, _ in self.relations]
        if len(set(names)) != len(names):
            raise ValueError("duplicate relation name in schema")
        if len(set(self.constants)) != len(self.constants):
            raise ValueError("duplicate constant name in schema")
        if set(names) & set(self.constants):
            raise ValueError("relation and constant names overlap")
        for n, a in self.relations:
            if not _valid_name(n):
                raise ValueError(f"bad relation name {n!r}")
            if a < 1:
                raise ValueError(f"relation {n} has arity {a} < 1")
        for c in self.constants:
            if not _valid_name(c) or c == "<":
                raise ValueError(f"bad constant name {c!r}")

    def arity(self, name: str) -> int:
        for n, a in self.relations:
            if n == name:
                return a
        raise KeyError(name)

    def has_relation(self, name: str) -> bool:
        return any(n == name for n, _ in self.relations)


ORDER_SCHEMA = Schema(relations=(("<", 2),))


@dataclass(frozen=True)
class Structure:
    """A finite structure with universe 0..size-1.

    ``relations`` holds one frozenset of tuples per schema relation, in schema order.
    ``constants`` holds one element per schema constant, in schema order.
    """

    schema: Schema
    size: int
    relations: tuple[frozenset, ...]
    constants: tuple[int, ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("structure size must be at least 1")
        rels = tuple(frozenset(tuple(int(x) for x in t) for t in r) for r in self.relations)
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "constants", tuple(int(c) for c in self.constants))
        if len(rels) != len(self.schema.relations):
            raise ValueError("relation count does not match schema")
        for (rname, arity), tuples in zip(self.schema.relations, rels):
            for t in tuples:
                if len(t) != arity:
                    raise ValueError(f"tuple {t} has wrong arity for {rname}")
                if any(not 0 <= x < self.size for x in t):
                    raise ValueError(f"tuple {t} of {rname} out of range")
        if len(self.constants) != len(self.schema.constants):
            raise ValueError("constant count does not match schema")
        for c, v in zip(self.schema.constants, self.constants):
            if not 0 <= v < self.size:
                raise ValueError(f"constant {c} out of range")

    @classmethod
    def build(cls, schema: Schema, size: int, relations: Mapping[str, Iterable] | None = None,
              constants: Mapping[str, int] | None = None, name: str = "") -> "Structure":
        relations = relations or {}
        constants = constants or {}
        unknown = set(relations) - {n for n, _ in schema.relations}
        if unknown:
            raise ValueError(f"unknown relations {sorted(unknown)}")
        rels = tuple(frozenset(tuple(t) for t in relations.get(n, ())) for n, _ in schema.relations)
        try:
            consts = tuple(constants[c] for c in schema.constants)
        except KeyError as e:
            raise ValueError(f"missing interpretation for constant {e.args[0]}") from None
        return cls(schema, size, rels, consts, name)

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.schema, self.size, self.relations, self.constants))
            object.__setattr__(self, "_hash", h)
        return h

    def relation(self, name: str) -> frozenset:
        for (n, _), tuples in zip(self.schema.relations, self.relations):
            if n == name:
                return tuples
        raise KeyError(name)

    def constant(self, name: str) -> int:
        return self.constants[self.schema.constants.index(name)]

    def sort_key(self):
        return (self.size, tuple(tuple(sorted(r)) for r in self.relations), self.constants)

    def __repr__(self):
        return f"Structure({self.name or '?'}, size={self.size})"


def gen_linear_order(n: int) -> Structure:
    if n < 1:
        raise ValueError("linear order needs at least one element")
    less = {(i, j) for i in range(n) for j in range(i + 1, n)}
    return Structure.build(ORDER_SCHEMA, n, {"<": less}, name=f"LO({n})")


def gen_rooted_tree(parent: Sequence[int | None], name: str = "") -> Structure:
    """Rooted tree where x < y means y is a proper ancestor of x."""
    n = len(parent)
    if n < 1:
        raise ValueError("tree needs at least one node")
    roots = [i for i, p in enumerate(parent) if p is None]
    if len(roots) != 1:
        raise ValueError(f"tree must have exactly one root, found {len(roots)}")
    for i, p in enumerate(parent):
        if p is not None and not 0 <= p < n:
            raise ValueError(f"parent index {p} out of range")
    less = set()
    for i in range(n):
        seen = {i}
        p = parent[i]
        while p is not None:
            if p in seen:
                raise ValueError("parent links contain a cycle")
            seen.add(p)
            less.add((i, p))
            p = parent[p]
    return Structure.build(ORDER_SCHEMA, n, {"<": less}, name=name or f"RT{list(parent)}")


@dataclass(frozen=True)
class PebbledStructure:
    """A structure together with a partial map color -> element.

    The assignment is stored as a sorted tuple of (color, element) pairs.
    """

    structure: Structure
    assignment: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        a = self.assignment
        if isinstance(a, Mapping):
            a = a.items()
        a = tuple(sorted((int(c), int(e)) for c, e in a))
        colors = [c for c, _ in a]
        if len(set(colors)) != len(colors):
            raise ValueError("a color may carry at most one pebble")
        for c, e in a:
            if c < 1:
                raise ValueError("pebble colors start at 1")
            if not 0 <= e < self.structure.size:
                raise ValueError(f"pebble {c} placed on out-of-range element {e}")
        object.__setattr__(self, "assignment", a)

    @property
    def colors(self) -> frozenset:
        return frozenset(c for c, _ in self.assignment)

    def element(self, color: int) -> int | None:
        for c, e in self.assignment:
            if c == color:
                return e
        return None

    def as_dict(self) -> dict[int, int]:
        return dict(self.assignment)

    def place(self, color: int, element: int) -> "PebbledStructure":
        if color < 1 or not 0 <= element < self.structure.size:
            raise ValueError(f"cannot place pebble {color} on element {element}")
        a = tuple(sorted([(c, e) for c, e in self.assignment if c != color] + [(color, element)]))
        # already normalized, so skip the validating constructor
        p = object.__new__(PebbledStructure)
        object.__setattr__(p, "structure", self.structure)
        object.__setattr__(p, "assignment", a)
        return p

    def sort_key(self):
        return (self.structure.sort_key(), self.assignment)

    def __repr__(self):
        pebs = ",".join(f"x{c}={e}" for c, e in self.assignment)
        return f"<{self.structure.name or '?'}|{pebs}>"


def pebble(structure: Structure, *elements: int) -> PebbledStructure:
    """Pebbled structure with colors 1..t on the given elements."""
    return PebbledStructure(structure, tuple(enumerate(elements, start=1)))


def atomic_signature(s: Structure, terms: Sequence[int]) -> tuple:
    """Equality pattern and relation facts of a list of elements.

    Two term lists (in the same positions) induce a partial isomorphism
    exactly when their signatures coincide.
    """
    first: dict[int, int] = {}
    pattern = []
    for e in terms:
        if e not in first:
            first[e] = len(first)
        pattern.append(first[e])
    facts = tuple(
        frozenset(tuple(first[x] for x in t) for t in tuples if all(x in first for x in t))
        for tuples in s.relations
    )
    return tuple(pattern), facts


def terms_of(p: PebbledStructure) -> list[int]:
    """Constants in schema order followed by pebbled elements in color order."""
    return list(p.structure.constants) + [e for _, e in p.assignment]


def pebbled_signature(p: PebbledStructure) -> tuple:
    return (tuple(c for c, _ in p.assignment),) + atomic_signature(p.structure, terms_of(p))


def matching_pair(p: PebbledStructure, q: PebbledStructure) -> bool:
    if p.structure.schema != q.structure.schema:
        raise ValueError("matching_pair needs structures over the same schema")
    if p.colors != q.colors:
        raise ValueError("matching_pair needs the same pebble colors on both structures")
    return pebbled_signature(p) == pebbled_signature(q)


def is_on_top(p: PebbledStructure, element: int) -> bool:
    if not 0 <= element < p.structure.size:
        raise ValueError(f"element {element} out of range")
    return any(e == element for _, e in p.assignment) or element in p.structure.constants


def oblivious_responses(p: PebbledStructure, color: int) -> list[PebbledStructure]:
    return [p.place(color, e) for e in range(p.structure.size)]


class OnTopPolicy:
    UNRESTRICTED = "unrestricted"
    FORBID_LEFT = "forbid-left"
    FORBID_RIGHT = "forbid-right"
    FORBID_BOTH = "forbid-both"
    ALL = (UNRESTRICTED, FORBID_LEFT, FORBID_RIGHT, FORBID_BOTH)

    @staticmethod
    def forbids(policy: str, side: str) -> bool:
        if policy not in OnTopPolicy.ALL:
            raise ValueError(f"unknown on-top policy {policy!r}")
        return policy == OnTopPolicy.FORBID_BOTH or policy == f"forbid-{side}"


@dataclass(frozen=True)
class VariantOptions:
    on_top_policy: str = OnTopPolicy.UNRESTRICTED
    color_limit: int | None = None
    hereditary: bool = False
    duplication_allowed: bool = True

    def __post_init__(self):
        if self.on_top_policy not in OnTopPolicy.ALL:
            raise ValueError(f"unknown on-top policy {self.on_top_policy!r}")
        if self.hereditary and self.color_limit is None:
            raise ValueError("the hereditary game needs a color limit")
        if self.color_limit is not None and self.color_limit < 1:
            raise ValueError("color limit must be positive")


@dataclass(frozen=True)
class Configuration:
    left: tuple[PebbledStructure, ...]
    right: tuple[PebbledStructure, ...]
    counter: int = 0
    options: VariantOptions = VariantOptions()
    swapped: bool = False

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(self.left))
        object.__setattr__(self, "right", tuple(self.right))
        colors = {p.colors for p in self.left + self.right}
        if len(colors) > 1:
            raise ValueError("all pebbled structures in a configuration need the same colors")


def _multiset_key(items):
    counts = Counter(items)
    return tuple(sorted(((p.sort_key(), n) for p, n in counts.items())))


def canonical_key(c: Configuration):
    return (_multiset_key(c.left), _multiset_key(c.right), c.counter, c.swapped, c.options)
