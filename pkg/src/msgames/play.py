"""Interactive play: a human (or the engine) against the engine at a terminal."""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field

from .evaluation import evaluate
from .formulas import And, Atom, Exists, Forall, FormulaSyntaxError, Not, Or, parse_formula, print_formula
from .games import DUPLICATOR, SPOILER, BudgetExceeded, ms_best_move
from .measures import F_Q, MeasureSpec, apply_measure
from .structures import OnTopPolicy, PebbledStructure, is_on_top, matching_pair
from .synthesis import AT_MOST, _SGSolver, _atom_value, _candidate_atoms, _prepare

HUMAN = "human"
ENGINE = "engine"


class QuitSession(Exception):
    pass


@dataclass
class Session:
    game: str
    winner: str = ""
    trace: list = field(default_factory=list)
    non_optimal: bool = False

    def to_json(self) -> str:
        return json.dumps({"game": self.game, "winner": self.winner, "non_optimal_engine": self.non_optimal,
                           "trace": self.trace}, indent=2)


class _IO:
    def __init__(self, stdin, stdout):
        self.stdin = stdin or sys.stdin
        self.stdout = stdout or sys.stdout

    def say(self, text=""):
        print(text, file=self.stdout)

    def ask(self, prompt):
        self.stdout.write(prompt)
        self.stdout.flush()
        line = self.stdin.readline()
        if not line:
            raise QuitSession()
        line = line.strip()
        if line in ("quit", "q"):
            raise QuitSession()
        return line


def render(p: PebbledStructure) -> str:
    s = p.structure
    marks = []
    for e in range(s.size):
        cols = [str(c) for c, x in p.assignment if x == e]
        marks.append(f"{e}" + (f"[{','.join(cols)}]" if cols else ""))
    return f"{s.name or 'S'}: " + " ".join(marks)


def _dedupe(items):
    return list(dict.fromkeys(items))


def _parse_ints(text):
    return [int(t) for t in text.replace(",", " ").split()]


# -- MS game --------------------------------------------------------------------

def play_ms(A, B, r: int, spoiler=HUMAN, duplicator=ENGINE, policy=OnTopPolicy.UNRESTRICTED,
            node_cap=200_000, stdin=None, stdout=None) -> Session:
    io = _IO(stdin, stdout)
    game = "ms" if policy == OnTopPolicy.UNRESTRICTED else "ms-no-on-top"
    sess = Session(game)
    left = _dedupe(PebbledStructure(s) for s in A)
    right = _dedupe(PebbledStructure(s) for s in B)
    try:
        for t in range(1, r + 1):
            if not any(matching_pair(p, q) for p in left for q in right):
                break
            io.say(f"-- round {t} of {r}")
            for p in left:
                io.say("  L " + render(p))
            for q in right:
                io.say("  R " + render(q))
            side, elems = _spoiler_ms(io, sess, left, right, r - t + 1, spoiler, policy, node_cap)
            S = left if side == "left" else right
            moved = [p.place(t, e) for p, e in zip(S, elems)]
            D = right if side == "left" else left
            replies = _duplicator_ms(io, D, t, duplicator)
            sess.trace.append({"round": t, "side": side, "spoiler": elems,
                               "duplicator": [sorted(x.element(t) for x in grp) for grp in replies]})
            answered = _dedupe(x for grp in replies for x in grp)
            if side == "left":
                left, right = _dedupe(moved), answered
            else:
                left, right = answered, _dedupe(moved)
    except QuitSession:
        io.say("session aborted")
        sess.winner = ""
        return sess
    won = not any(matching_pair(p, q) for p in left for q in right)
    sess.winner = SPOILER if won else DUPLICATOR
    io.say(f"winner: {sess.winner}")
    return sess


def _spoiler_ms(io, sess, left, right, rounds, who, policy, node_cap):
    if who == ENGINE:
        try:
            winner, move = ms_best_move(left, right, rounds, policy, node_cap=node_cap)
        except BudgetExceeded:
            winner, move = DUPLICATOR, None
            sess.non_optimal = True
        if move is None:
            # no forced win (or already won): any legal move will do
            elems = []
            for p in left:
                ok = [e for e in range(p.structure.size)
                      if not (OnTopPolicy.forbids(policy, "left") and is_on_top(p, e))]
                elems.append(ok[0] if ok else 0)
            move = ("left", elems)
        io.say(f"  Spoiler plays {move[0]} {' '.join(map(str, move[1]))}")
        return move
    while True:
        line = io.ask("Spoiler> side (L/R) then one element per structure: ")
        parts = line.split(maxsplit=1)
        if len(parts) == 2 and parts[0].upper() in ("L", "R"):
            side = "left" if parts[0].upper() == "L" else "right"
            S = left if side == "left" else right
            try:
                elems = _parse_ints(parts[1])
            except ValueError:
                elems = None
            if elems is not None and len(elems) == len(S) and \
                    all(0 <= e < p.structure.size for p, e in zip(S, elems)):
                if not (OnTopPolicy.forbids(policy, side) and any(is_on_top(p, e) for p, e in zip(S, elems))):
                    return side, elems
                io.say("  playing on top is not allowed on that side")
                continue
        io.say("  illegal move, try again")


def _duplicator_ms(io, D, t, who):
    if who == ENGINE:
        return [[p.place(t, e) for e in range(p.structure.size)] for p in D]
    while True:
        line = io.ask("Duplicator> elements for each structure, groups separated by ';': ")
        groups = line.split(";")
        try:
            picks = [_parse_ints(g) for g in groups]
        except ValueError:
            picks = None
        if picks is not None and len(picks) == len(D) and all(picks) and \
                all(0 <= e < p.structure.size for p, g in zip(D, picks) for e in g):
            return [[p.place(t, e) for e in g] for p, g in zip(D, picks)]
        io.say("  illegal reply, try again")


# -- QVT / syntactic game -------------------------------------------------------------

def play_sg(A, B, r: int, k: int, m: MeasureSpec = F_Q, spoiler=HUMAN, node_cap=200_000,
            stdin=None, stdout=None) -> Session:
    """Spoiler grows the game tree node by node; Duplicator answers obliviously."""
    io = _IO(stdin, stdout)
    sess = Session("qvt" if m is F_Q else f"sg:{m.name}")
    A2, B2, structures, _, _ = _prepare(A, B, k, m)
    open_nodes = [(_dedupe(A2), _dedupe(B2), r, False, "root")]
    try:
        while open_nodes:
            L, R, c, after_swap, path = open_nodes.pop()
            io.say(f"-- node {path}, counter {c}")
            for p in L:
                io.say("  L " + render(p))
            for q in R:
                io.say("  R " + render(q))
            move = _spoiler_sg(io, sess, L, R, c, k, m, after_swap, spoiler, node_cap)
            if move is None:
                sess.trace.append({"node": path, "move": "stuck"})
                sess.winner = DUPLICATOR
                io.say(f"winner: {DUPLICATOR}")
                return sess
            sess.trace.append({"node": path, "move": move["text"]})
            io.say(f"  Spoiler: {move['text']}")
            for i, child in reversed(list(enumerate(move["children"]))):
                open_nodes.append(child[:3] + (move["kind"] == "not", f"{path}.{i}"))
    except QuitSession:
        io.say("session aborted")
        return sess
    sess.winner = SPOILER
    io.say(f"winner: {SPOILER}")
    return sess


def _close_ok(a, L, R, c, m):
    if m.h_atomic(a) > c:
        return False
    return all(_atom_value(a, p.structure, p.as_dict()) for p in L) and \
        not any(_atom_value(a, p.structure, p.as_dict()) for p in R)


def _pair_ok(pair, allowed):
    return any(pair[0] <= a and pair[1] <= b for a, b in allowed)


def _apply_formula_move(f, L, R, c, m):
    """The move Spoiler makes when following formula f at node (L, R, c)."""
    if isinstance(f, Atom):
        return {"kind": "close", "text": f"close {print_formula(f)}", "children": []}
    if isinstance(f, Not):
        return {"kind": "not", "text": "not", "children": [(R, L, max(m.inv_not(c)))]}
    if isinstance(f, (Exists, Forall)):
        ex = isinstance(f, Exists)
        S, D = (L, R) if ex else (R, L)
        picks = [next(e for e in range(p.structure.size) if evaluate(f.body, p.place(f.var, e)) == ex) for p in S]
        Sn = _dedupe(p.place(f.var, e) for p, e in zip(S, picks))
        Dn = _dedupe(p.place(f.var, e) for p in D for e in range(p.structure.size))
        c2 = max((m.inv_exists if ex else m.inv_forall)(c))
        kids = [(Sn, Dn, c2)] if ex else [(Dn, Sn, c2)]
        word = "exists" if ex else "forall"
        return {"kind": word, "text": f"{word} {f.var} " + " ".join(map(str, picks)), "children": kids}
    left_side = isinstance(f, Or)
    S = L if left_side else R
    first = [i for i, p in enumerate(S) if evaluate(f.left, p) == left_side]
    S1 = [S[i] for i in first]
    S2 = [p for i, p in enumerate(S) if i not in first]
    helper = m.inv_or if left_side else m.inv_and
    v1, v2 = apply_measure(m, f.left), apply_measure(m, f.right)
    c1, c2 = next(((a, b) for a, b in sorted(helper(c)) if v1 <= a and v2 <= b), (v1, v2))
    word = "or" if left_side else "and"
    kids = [(S1, R, c1), (S2, R, c2)] if left_side else [(L, S1, c1), (L, S2, c2)]
    return {"kind": word, "text": f"{word} {','.join(map(str, first))} {c1} {c2}", "children": kids}


def _engine_formula(L, R, c, k, m, node_cap):
    _, _, structures, Li, Ri = _prepare(L, R, k, m)
    solver = _SGSolver(structures, k, m, AT_MOST, True, node_cap, top=c)
    return solver.solve(frozenset(Li), frozenset(Ri), c)


def _spoiler_sg(io, sess, L, R, c, k, m, after_swap, who, node_cap):
    if who == ENGINE:
        try:
            f = _engine_formula(L, R, c, k, m, node_cap)
        except BudgetExceeded:
            sess.non_optimal = True
            f = None
        if f is None:
            return None
        return _apply_formula_move(f, L, R, c, m)
    help_text = ("  moves: close <atom> | exists <color> <elem per left structure> | "
                 "forall <color> <elem per right structure> | or <left indices> <c1> <c2> | "
                 "and <right indices> <c1> <c2> | not | resign")
    while True:
        line = io.ask("Spoiler> ")
        word, _, rest = line.partition(" ")
        try:
            if word == "resign":
                return None
            if word == "close":
                a = parse_formula(rest)
                if isinstance(a, Atom) and _close_ok(a, L, R, c, m):
                    return {"kind": "close", "text": f"close {print_formula(a)}", "children": []}
            elif word == "not" and not after_swap and m.inv_not(c):
                return {"kind": "not", "text": "not", "children": [(R, L, max(m.inv_not(c)))]}
            elif word in ("exists", "forall"):
                ex = word == "exists"
                nums = _parse_ints(rest)
                color, picks = nums[0], nums[1:]
                S, D = (L, R) if ex else (R, L)
                inv = (m.inv_exists if ex else m.inv_forall)(c)
                if inv and 1 <= color <= k and len(picks) == len(S) and \
                        all(0 <= e < p.structure.size for p, e in zip(S, picks)):
                    Sn = _dedupe(p.place(color, e) for p, e in zip(S, picks))
                    Dn = _dedupe(p.place(color, e) for p in D for e in range(p.structure.size))
                    c2 = max(inv)
                    kids = [(Sn, Dn, c2)] if ex else [(Dn, Sn, c2)]
                    return {"kind": word, "text": f"{word} {color} " + " ".join(map(str, picks)), "children": kids}
            elif word in ("or", "and"):
                idx_text, c1, c2 = rest.split()
                idx = _parse_ints(idx_text)
                c1, c2 = int(c1), int(c2)
                S = L if word == "or" else R
                helper = m.inv_or if word == "or" else m.inv_and
                if idx and len(idx) < len(S) and all(0 <= i < len(S) for i in idx) and _pair_ok((c1, c2), helper(c)):
                    S1 = [S[i] for i in sorted(set(idx))]
                    S2 = [p for i, p in enumerate(S) if i not in idx]
                    kids = [(S1, R, c1), (S2, R, c2)] if word == "or" else [(L, S1, c1), (L, S2, c2)]
                    return {"kind": word, "text": f"{word} {idx_text} {c1} {c2}", "children": kids}
        except (ValueError, IndexError, FormulaSyntaxError):
            pass
        if not _has_move(L, R, c, k, m, after_swap):
            return None
        io.say("  illegal move, try again")
        io.say(help_text)


def _has_move(L, R, c, k, m, after_swap):
    if m.inv_exists(c) or m.inv_forall(c):
        return True
    if len(L) > 1 and m.inv_or(c) or len(R) > 1 and m.inv_and(c):
        return True
    if not after_swap and m.inv_not(c):
        return True
    dom = next(iter(L or R)).colors
    schema = next(iter(L or R)).structure.schema
    return any(_close_ok(a, L, R, c, m) for a in _candidate_atoms(schema, dom))
