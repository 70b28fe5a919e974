"""The syntactic game SG(r, k, f): solver, certificates and separating-formula synthesis."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable

from .evaluation import evaluate, holds, is_separating
from .formulas import (EQ, And, Atom, Const, Exists, Forall, Formula, Not, Or, Var, all_vars,
                       free_vars, print_formula)
from .games import DUPLICATOR, SPOILER, BudgetExceeded, GameResult, _Budget, _MSSolver
from .hintikka import UNSET, TypeIndex
from .measures import F_Q, F_T, MeasureSpec, apply_measure
from .structures import OnTopPolicy, PebbledStructure, Structure

AT_MOST = "at-most"
EXACT = "exact"


# -- certificates -------------------------------------------------------------

@dataclass
class SGNode:
    left: tuple
    right: tuple
    counter: int
    move: tuple = ()
    children: list = field(default_factory=list)


@dataclass
class Certificate:
    root: SGNode
    formula: Formula
    measure_value: int
    k: int
    measure: str

    def text(self) -> str:
        return print_formula(self.formula)


class OpenLeafError(ValueError):
    pass


def extract_formula(cert: Certificate | SGNode) -> Formula:
    node = cert.root if isinstance(cert, Certificate) else cert
    kind = node.move[0] if node.move else None
    if kind == "Close":
        return node.move[1]
    if kind == "Swap":
        return Not(extract_formula(node.children[0]))
    if kind == "PebbleLeft":
        return Exists(node.move[1], extract_formula(node.children[0]))
    if kind == "PebbleRight":
        return Forall(node.move[1], extract_formula(node.children[0]))
    if kind == "SplitLeft":
        return Or(extract_formula(node.children[0]), extract_formula(node.children[1]))
    if kind == "SplitRight":
        return And(extract_formula(node.children[0]), extract_formula(node.children[1]))
    raise OpenLeafError("certificate tree has an open leaf")


def _uniq(items):
    return tuple(dict.fromkeys(items))


def build_certificate(phi: Formula, A, B, m: MeasureSpec, k: int) -> Certificate:
    """Closed game tree following phi on the concrete sides (A, B)."""
    def grow(f, L, R):
        node = SGNode(L, R, apply_measure(m, f))
        if isinstance(f, Atom):
            node.move = ("Close", f)
        elif isinstance(f, Not):
            node.move = ("Swap",)
            node.children = [grow(f.body, R, L)]
        elif isinstance(f, Or):
            L1 = _uniq(p for p in L if evaluate(f.left, p))
            L2 = _uniq(p for p in L if p not in L1)
            node.move = ("SplitLeft", len(L1), len(L2))
            node.children = [grow(f.left, L1, R), grow(f.right, L2, R)]
        elif isinstance(f, And):
            R1 = _uniq(p for p in R if not evaluate(f.left, p))
            R2 = _uniq(p for p in R if p not in R1)
            node.move = ("SplitRight", len(R1), len(R2))
            node.children = [grow(f.left, L, R1), grow(f.right, L, R2)]
        elif isinstance(f, Exists):
            Ln = []
            for p in L:
                e = next(e for e in range(p.structure.size) if evaluate(f.body, p.place(f.var, e)))
                Ln.append(p.place(f.var, e))
            Rn = [p.place(f.var, e) for p in R for e in range(p.structure.size)]
            node.move = ("PebbleLeft", f.var)
            node.children = [grow(f.body, _uniq(Ln), _uniq(Rn))]
        else:
            Rn = []
            for p in R:
                e = next(e for e in range(p.structure.size) if not evaluate(f.body, p.place(f.var, e)))
                Rn.append(p.place(f.var, e))
            Ln = [p.place(f.var, e) for p in L for e in range(p.structure.size)]
            node.move = ("PebbleRight", f.var)
            node.children = [grow(f.body, _uniq(Ln), _uniq(Rn))]
        return node

    L = _uniq(_pebbled(A))
    R = _uniq(_pebbled(B))
    if not is_separating(phi, L, R):
        raise ValueError("formula does not separate the given sides")
    root = grow(phi, L, R)
    return Certificate(root, phi, apply_measure(m, phi), k, m.name)


def verify_certificate(cert: Certificate, A, B, m: MeasureSpec, r: int, mode: str = AT_MOST) -> bool:
    f = extract_formula(cert)
    value = apply_measure(m, f)
    ok_value = value == r if mode == EXACT else value <= r
    return is_separating(f, _pebbled(A), _pebbled(B)) and ok_value and all_vars(f) <= set(range(1, cert.k + 1))


# -- helpers shared by the solver and the naive oracle -------------------------

def _pebbled(items) -> list[PebbledStructure]:
    return [PebbledStructure(p) if isinstance(p, Structure) else p for p in items]


def _domain(items) -> frozenset:
    doms = {p.colors for p in items}
    if len(doms) > 1:
        raise ValueError("structure-assignment pairs do not share a common domain")
    return next(iter(doms), frozenset())


def _candidate_atoms(schema, domain) -> list[Atom]:
    terms = [Var(c) for c in sorted(domain)] + [Const(c) for c in schema.constants]
    atoms = [Atom(EQ, (terms[i], terms[j])) for i in range(len(terms)) for j in range(i, len(terms))]
    for name, arity in schema.relations:
        atoms += [Atom(name, args) for args in product(terms, repeat=arity)]
    return atoms


def _atom_value(a: Atom, s: Structure, env) -> bool:
    vals = tuple(env[t.index] if isinstance(t, Var) else s.constant(t.name) for t in a.args)
    if a.pred == EQ:
        return vals[0] == vals[1]
    return vals in s.relation(a.pred)


def _counter_ok(value, c, mode):
    return value == c if mode == EXACT else value <= c


def _pareto_max(pairs):
    pairs = list(dict.fromkeys(pairs))
    return [p for p in pairs if not any(q != p and q[0] >= p[0] and q[1] >= p[1] for q in pairs)]


# -- the solver -------------------------------------------------------------------

# Most quantifiers a formula of the given measure can contain, when bounded.
QUANTIFIER_BOUND = {
    "qcount": lambda c: c,
    "fsize": lambda c: max(c - 1, 0),
}


class _SGSolver:
    def __init__(self, structures, k, m: MeasureSpec, mode, use_types, node_cap, top=None):
        self.structures = structures
        self.schema = structures[0].schema
        self.k = k
        self.m = m
        self.mode = mode
        self.use_types = use_types and m.rank_bound(0) is not None
        self.ti = TypeIndex(structures, k, mode="colors")
        self.budget = _Budget(node_cap)
        self.memo: dict = {}
        self.atom_cache: dict = {}
        self.path: set = set()
        self.cuts = 0
        # a position Duplicator wins in the MS game with that many rounds cannot be
        # separated by any formula with that many quantifiers
        bound = QUANTIFIER_BOUND.get(m.name)
        self.ms = None
        if self.use_types and bound is not None and top is not None:
            self.q_bound = bound
            self.ms = _MSSolver([], structures, 0, OnTopPolicy.UNRESTRICTED, None, depth=k + bound(top))

    # items are (structure index, assignment tuple) as in TypeIndex
    def level(self, c):
        return self.m.rank_bound(c)

    def canon(self, items, c) -> frozenset:
        if not self.use_types:
            return frozenset(items)
        lv = self.level(c)
        ti = self.ti
        return frozenset(ti.representative(ti.type(x, lv), lv) for x in items)

    def env(self, item):
        return {i + 1: e for i, e in enumerate(item[1]) if e != UNSET}

    def domain(self, items):
        x = next(iter(items))
        return frozenset(self.ti.domain(x))

    def atoms_for(self, domain):
        if domain not in self.atom_cache:
            atoms = _candidate_atoms(self.schema, domain)
            self.atom_cache[domain] = sorted(atoms, key=print_formula)
        return self.atom_cache[domain]

    def close(self, L, R, c, dom):
        for a in self.atoms_for(dom):
            if not _counter_ok(self.m.h_atomic(a), c, self.mode):
                continue
            if all(_atom_value(a, self.structures[x[0]], self.env(x)) for x in L) and \
                    not any(_atom_value(a, self.structures[x[0]], self.env(x)) for x in R):
                return a
        return None

    def solve(self, L, R, c):
        """Formula separating (L, R) within counter c, or None."""
        self.budget.tick()
        L, R = self.canon(L, c), self.canon(R, c)
        if self.use_types and (L & R):
            return None
        key = (L, R, c)
        if key in self.memo:
            return self.memo[key]
        if key in self.path:
            self.cuts += 1
            return None
        if self.ms is not None and not self.ms_spoiler(L, R, c):
            self.memo[key] = None
            return None
        self.path.add(key)
        cuts_before = self.cuts
        res = self.search(L, R, c)
        self.path.discard(key)
        # a loss that hit a path cut is only valid on this path
        if res is not None or self.cuts == cuts_before:
            self.memo[key] = res
        return res

    def ms_spoiler(self, L, R, c):
        items = L | R
        if not L or not R:
            return True
        dom = sorted(self.ti.domain(next(iter(items))))
        j = self.q_bound(c)
        ti = self.ms.ti

        def tid(x):
            return ti.type((x[0], tuple(x[1][col - 1] for col in dom)), j)

        return self.ms.solve(frozenset(map(tid, L)), frozenset(map(tid, R)), j)

    def search(self, L, R, c):
        m = self.m
        items = L | R
        if not items:
            return None
        dom = self.domain(items)
        sl, sr = sorted(L), sorted(R)
        a = self.close(sl, sr, c, dom)
        if a is not None:
            return a
        # Pebble moves
        colors = sorted(dom) + [c2 for c2 in range(1, self.k + 1) if c2 not in dom][:1]
        for side in ("left", "right"):
            inv = m.inv_exists(c) if side == "left" else m.inv_forall(c)
            for color in colors:
                for c2 in sorted(inv):
                    f = self.pebble(sl, sr, c2, color, side)
                    if f is not None:
                        return Exists(color, f) if side == "left" else Forall(color, f)
        # Splits
        for side in ("left", "right"):
            f = self.split(sl, sr, c, side)
            if f is not None:
                return f
        # Swap
        if m.self_dual:
            for a in self.atoms_for(dom):
                if not _counter_ok(m.h_not(m.h_atomic(a)), c, self.mode):
                    continue
                if all(_atom_value(a, self.structures[x[0]], self.env(x)) for x in sr) and \
                        not any(_atom_value(a, self.structures[x[0]], self.env(x)) for x in sl):
                    return Not(a)
        else:
            for c2 in sorted(m.inv_not(c)):
                if c2 == c and self.mode == AT_MOST:
                    continue
                f = self.solve(frozenset(R), frozenset(L), c2)
                if f is not None:
                    return Not(f)
        return None

    def placements(self, x, color, c2):
        """Placements of color on x, one per canonical successor, in element order."""
        out = {}
        for e in range(self.structures[x[0]].size):
            y = self.ti.place(x, color, e)
            key = next(iter(self.canon([y], c2)))
            out.setdefault(key, y)
        return list(out.values())

    def pebble(self, sl, sr, c2, color, side):
        S, D = (sl, sr) if side == "left" else (sr, sl)
        Dn = set()
        for y in D:
            Dn.update(self.placements(y, color, c2))
        Dn = self.canon(Dn, c2)
        opt_lists = []
        for x in S:
            opts = [o for o in self.placements(x, color, c2) if not (self.use_types and self.canon([o], c2) <= Dn)]
            if not opts:
                return None
            opt_lists.append(opts)
        seen = set()
        for pick in product(*opt_lists):
            Sn = self.canon(pick, c2)
            if Sn in seen:
                continue
            seen.add(Sn)
            f = self.solve(Sn, Dn, c2) if side == "left" else self.solve(Dn, Sn, c2)
            if f is not None:
                return f
        return None

    def split(self, sl, sr, c, side):
        S, D = (sl, sr) if side == "left" else (sr, sl)
        helper = self.m.inv_or if side == "left" else self.m.inv_and
        pairs = sorted(helper(c))
        if self.mode == AT_MOST:
            pairs = sorted(_pareto_max(pairs))
            parts = [S1 for n in range(1, len(S)) for S1 in combinations(S, n)]
        else:
            parts = [S1 for n in range(0, len(S) + 1) for S1 in combinations(S, n)]
        Dset = frozenset(D)
        for S1 in parts:
            S1 = frozenset(S1)
            S2 = frozenset(S) - S1
            for c1, c2 in pairs:
                # splitting off nothing at the same counter just revisits this node
                if (not S1 and c2 == c) or (not S2 and c1 == c):
                    continue
                if self.use_types and (self.quick_loss(S1, Dset, c1) or self.quick_loss(S2, Dset, c2)):
                    continue
                f1 = self.solve(S1, Dset, c1) if side == "left" else self.solve(Dset, S1, c1)
                if f1 is None:
                    continue
                if self.mode == AT_MOST:
                    # the first part may as well take every item f1 already handles
                    S2 = frozenset(x for x in S2 if self.holds(f1, x) != (side == "left"))
                    if not S2:
                        return f1
                f2 = self.solve(S2, Dset, c2) if side == "left" else self.solve(Dset, S2, c2)
                if f2 is not None:
                    return Or(f1, f2) if side == "left" else And(f1, f2)
        return None

    def holds(self, f, item):
        return holds(f, self.structures[item[0]], self.env(item))

    def quick_loss(self, S, D, c):
        return bool(S) and bool(self.canon(S, c) & self.canon(D, c))


def drop_vacuous(f: Formula) -> Formula:
    """Remove quantifiers whose variable is not free in their body (structures are nonempty)."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(drop_vacuous(f.body))
    if isinstance(f, (And, Or)):
        return type(f)(drop_vacuous(f.left), drop_vacuous(f.right))
    body = drop_vacuous(f.body)
    if f.var not in free_vars(body):
        return body
    return type(f)(f.var, body)


def _prepare(A, B, k, m: MeasureSpec):
    A, B = _pebbled(A), _pebbled(B)
    if not A and not B:
        raise ValueError("at least one side must be nonempty")
    dom = _domain(A + B)
    if k < 1 or not dom <= set(range(1, k + 1)):
        raise ValueError("common domain must lie within x1..xk")
    if m is F_T:
        raise ValueError("the always-zero measure has an unbounded game tree; use decide_pebble")
    structures = []
    index = {}
    for p in A + B:
        if p.structure not in index:
            index[p.structure] = len(structures)
            structures.append(p.structure)
    if len({s.schema for s in structures}) != 1:
        raise ValueError("all structures must share one schema")

    def item(p):
        a = [UNSET] * k
        for col, e in p.assignment:
            a[col - 1] = e
        return (index[p.structure], tuple(a))

    return A, B, structures, [item(p) for p in A], [item(p) for p in B]


def decide_sg(A, B, r: int, k: int, m: MeasureSpec, mode: str = AT_MOST,
              use_types: bool = True, node_cap=None) -> GameResult:
    if mode not in (AT_MOST, EXACT):
        raise ValueError(f"unknown mode {mode!r}")
    if r < 0:
        raise ValueError("r must be non-negative")
    A, B, structures, L, R = _prepare(A, B, k, m)
    solver = _SGSolver(structures, k, m, mode, use_types, node_cap, top=r)
    f = solver.solve(frozenset(L), frozenset(R), r)
    if f is None:
        return GameResult(DUPLICATOR, solver.budget.nodes)
    if mode == AT_MOST:
        f = drop_vacuous(f)
    cert = build_certificate(f, A, B, m, k)
    return GameResult(SPOILER, solver.budget.nodes, certificate=cert)


def decide_qvt(A, B, r: int, k: int, mode: str = AT_MOST, use_types=True, node_cap=None) -> GameResult:
    return decide_sg(A, B, r, k, F_Q, mode=mode, use_types=use_types, node_cap=node_cap)


@dataclass
class MinMeasureResult:
    value: int | None
    certificate: Certificate | None
    nodes: int


def min_measure(A, B, k: int, m: MeasureSpec, r_max: int, node_cap=None) -> MinMeasureResult:
    total = 0
    for r in range(r_max + 1):
        try:
            res = decide_sg(A, B, r, k, m, mode=AT_MOST, node_cap=node_cap)
        except BudgetExceeded as e:
            e.frontier = {"measure": m.name, "r": r, "nodes_before": total}
            raise
        total += res.nodes
        if res.spoiler_wins:
            return MinMeasureResult(r, res.certificate, total)
    return MinMeasureResult(None, None, total)


# -- naive reference oracle ---------------------------------------------------

ORACLE_MAX_UNIVERSE = 5
ORACLE_MAX_R = 3


def naive_oracle_sg(A, B, r: int, k: int, m: MeasureSpec, mode: str = AT_MOST) -> str:
    """Exhaustive game recursion on literal positions.

    No type merging, no option pruning, every color and every partition is
    tried. Results are cached on the literal position. A swap straight back
    at the same counter is skipped, since a double negation never helps.
    """
    A, B = _pebbled(A), _pebbled(B)
    total = sum(s.size for s in {p.structure for p in A + B})
    if total > ORACLE_MAX_UNIVERSE or r > ORACLE_MAX_R:
        raise ValueError("instance exceeds the naive oracle size guard")
    if m is F_T:
        raise ValueError("the always-zero measure has an unbounded game tree")
    dom = _domain(A + B)
    if not dom <= set(range(1, k + 1)):
        raise ValueError("common domain must lie within x1..xk")
    schema = (A + B)[0].structure.schema
    memo = {}

    def atom_ok(a, L, R, c):
        if not _counter_ok(m.h_atomic(a), c, mode):
            return False
        return all(_atom_value(a, p.structure, p.as_dict()) for p in L) and \
            not any(_atom_value(a, p.structure, p.as_dict()) for p in R)

    def win(L, R, c, swapped):
        key = (L, R, c, swapped)
        if key not in memo:
            memo[key] = search(L, R, c, swapped)
        return memo[key]

    def search(L, R, c, swapped):
        items = L | R
        if not items:
            return False
        dom = next(iter(items)).colors
        if any(atom_ok(a, L, R, c) for a in _candidate_atoms(schema, dom)):
            return True
        for color in range(1, k + 1):
            for side in ("left", "right"):
                inv = m.inv_exists(c) if side == "left" else m.inv_forall(c)
                S, D = (L, R) if side == "left" else (R, L)
                Dn = frozenset(p.place(color, e) for p in D for e in range(p.structure.size))
                S_list = sorted(S, key=lambda p: p.sort_key())
                for c2 in inv:
                    for pick in product(*[range(p.structure.size) for p in S_list]):
                        Sn = frozenset(p.place(color, e) for p, e in zip(S_list, pick))
                        if (win(Sn, Dn, c2, False) if side == "left" else win(Dn, Sn, c2, False)):
                            return True
        for side in ("left", "right"):
            S, D = (L, R) if side == "left" else (R, L)
            helper = m.inv_or if side == "left" else m.inv_and
            S_list = sorted(S, key=lambda p: p.sort_key())
            lo = 0 if mode == EXACT else 1
            hi = len(S_list) if mode == EXACT else len(S_list) - 1
            for n in range(lo, hi + 1):
                for S1 in combinations(S_list, n):
                    S1 = frozenset(S1)
                    S2 = S - S1
                    for c1, c2 in helper(c):
                        # an empty part at an unchanged counter restates the node itself
                        if (not S1 and c2 == c) or (not S2 and c1 == c):
                            continue
                        if side == "left":
                            if win(S1, D, c1, False) and win(S2, D, c2, False):
                                return True
                        elif win(D, S1, c1, False) and win(D, S2, c2, False):
                            return True
        for c2 in m.inv_not(c):
            if swapped and c2 == c:
                continue
            if win(R, L, c2, c2 == c):
                return True
        return False

    won = win(frozenset(A), frozenset(B), r, False)
    return SPOILER if won else DUPLICATOR
