"""Replay the Spoiler strategy read off a prenex separating sentence."""

from __future__ import annotations

from dataclasses import dataclass, field

from .evaluation import evaluate, separation_failure
from .formulas import Exists, Formula, build_prenex, is_prenex, is_sentence, to_prenex
from .rtypes import standard_prenex
from .structures import PebbledStructure, is_on_top, matching_pair


class NotSeparatingError(ValueError):
    def __init__(self, side, item):
        super().__init__(f"sentence is not separating: fails on {side} structure {item.structure.name or item!r}")
        self.side = side
        self.item = item


@dataclass
class Placement:
    before: PebbledStructure
    element: int
    on_top: bool


@dataclass
class FollowMove:
    round: int
    side: str
    quantifier: str
    placements: list = field(default_factory=list)


@dataclass
class FollowTrace:
    moves: list
    left: list
    right: list

    @property
    def on_top_count(self) -> int:
        return sum(p.on_top for m in self.moves for p in m.placements)

    @property
    def spoiler_wins(self) -> bool:
        return not any(matching_pair(p, q) for p in self.left for q in self.right)


def _dedupe(items):
    return list(dict.fromkeys(items))


def follow_sentence(psi: Formula, A, B) -> FollowTrace:
    if not is_sentence(psi):
        raise ValueError("follow_sentence needs a sentence")
    if not is_prenex(psi):
        psi = to_prenex(psi)
    quants, matrix = standard_prenex(psi)
    left = [PebbledStructure(s) for s in A]
    right = [PebbledStructure(s) for s in B]
    bad = separation_failure(psi, left, right)
    if bad:
        raise NotSeparatingError(*bad)
    prefix = [(q, i + 1) for i, q in enumerate(quants)]
    moves = []
    for t, q in enumerate(quants, start=1):
        rest = build_prenex(prefix[t:], matrix)
        ex = q is Exists
        spoiler_side = left if ex else right
        move = FollowMove(t, "left" if ex else "right", "EX" if ex else "ALL")
        chosen = []
        for p in spoiler_side:
            witnesses = [e for e in range(p.structure.size) if evaluate(rest, p.place(t, e)) == ex]
            # any witness works; prefer one that avoids stacking
            plain = [e for e in witnesses if not is_on_top(p, e)]
            e = (plain or witnesses)[0]
            move.placements.append(Placement(p, e, is_on_top(p, e)))
            chosen.append(p.place(t, e))
        others = [p.place(t, e) for p in (right if ex else left) for e in range(p.structure.size)]
        if ex:
            left, right = _dedupe(chosen), _dedupe(others)
        else:
            left, right = _dedupe(others), _dedupe(chosen)
        moves.append(move)
    trace = FollowTrace(moves, left, right)
    if not trace.spoiler_wins:
        raise RuntimeError("followed strategy ended with a matching pair")
    return trace
