"""Refinement types of pebbled positions.

Two positions with the same level-j type satisfy the same formulas of
quantifier rank at most j (with the variable discipline of the mode), so the
game engines may merge them. Level 0 is the atomic type, which decides
whether two positions form a matching pair.

Modes:
  "prefix": positions carry colors 1..t; the only move places color t+1
            (unbounded variables, fresh pebbles as in the MS game).
  "colors": positions are partial maps over colors 1..k; a move (re)assigns
            any color (k reusable pebbles).
"""

from __future__ import annotations

from .structures import Structure, atomic_signature

UNSET = -1


class TypeIndex:
    def __init__(self, structures: list[Structure], k: int, mode: str = "colors"):
        if mode not in ("prefix", "colors"):
            raise ValueError(mode)
        self.structures = list(structures)
        self.k = k
        self.mode = mode
        self._t0: dict = {}
        self._t0_ids: dict = {}
        self._levels: list[dict] = []   # level j -> {signature: id}
        self._cache: list[dict] = []    # level j -> {item: id}
        self.rep: list[dict] = []       # level j -> {id: representative item}

    # items are (structure index, assignment tuple)
    def root(self, sidx: int):
        if self.mode == "prefix":
            return (sidx, ())
        return (sidx, (UNSET,) * self.k)

    def size(self, item) -> int:
        return self.structures[item[0]].size

    def domain(self, item) -> tuple:
        if self.mode == "prefix":
            return tuple(range(1, len(item[1]) + 1))
        return tuple(c + 1 for c, e in enumerate(item[1]) if e != UNSET)

    def move_colors(self, item) -> list[int]:
        if self.mode == "prefix":
            return [len(item[1]) + 1] if len(item[1]) < self.k else []
        return list(range(1, self.k + 1))

    def place(self, item, color: int, element: int):
        sidx, a = item
        if self.mode == "prefix":
            if color != len(a) + 1:
                raise ValueError("prefix positions only extend by the next color")
            return (sidx, a + (element,))
        a = list(a)
        a[color - 1] = element
        return (sidx, tuple(a))

    def elements(self, item) -> list[int]:
        """Pebbled elements in color order."""
        return [e for e in item[1] if e != UNSET]

    def is_on_top(self, item, element: int) -> bool:
        s = self.structures[item[0]]
        return element in self.elements(item) or element in s.constants

    def type0(self, item) -> int:
        t = self._t0.get(item)
        if t is None:
            s = self.structures[item[0]]
            sig = (self.domain(item),) + atomic_signature(s, list(s.constants) + self.elements(item))
            t = self._t0_ids.setdefault(sig, len(self._t0_ids))
            self._t0[item] = t
        return t

    def _ensure(self, j):
        while len(self._levels) <= j:
            self._levels.append({})
            self._cache.append({})
            self.rep.append({})

    def type(self, item, j: int) -> int:
        self._ensure(j)
        cache = self._cache[j]
        t = cache.get(item)
        if t is not None:
            return t
        if j == 0:
            t = self.type0(item)
        else:
            parts = []
            for c in self.move_colors(item):
                kids = frozenset(self.type(self.place(item, c, e), j - 1) for e in range(self.size(item)))
                parts.append(kids)
            sig = (self.type0(item), tuple(parts))
            table = self._levels[j]
            t = table.setdefault(sig, len(table))
        cache[item] = t
        self.rep[j].setdefault(t, item)
        return t

    def representative(self, tid: int, j: int):
        return self.rep[j][tid]

    def t0_of(self, tid: int, j: int) -> int:
        return self.type0(self.rep[j][tid])

    def children(self, item, color: int, j: int) -> dict:
        """Level-j types of the placements of color on item, each with its smallest element."""
        out: dict = {}
        for e in range(self.size(item)):
            out.setdefault(self.type(self.place(item, color, e), j), e)
        return out
