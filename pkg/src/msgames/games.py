"""Decision procedures for the MS game, its variants, EF games and the pebble game."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .hintikka import UNSET, TypeIndex
from .structures import OnTopPolicy, Structure, atomic_signature

SPOILER = "Spoiler"
DUPLICATOR = "Duplicator"
DEFAULT_NODE_CAP = 10**7


class BudgetExceeded(RuntimeError):
    def __init__(self, nodes: int, frontier=None):
        super().__init__(f"search budget exceeded after {nodes} nodes")
        self.nodes = nodes
        self.frontier = frontier


@dataclass
class GameResult:
    winner: str
    nodes: int = 0
    trace: list = field(default_factory=list)
    certificate: object = None

    @property
    def spoiler_wins(self) -> bool:
        return self.winner == SPOILER

    def __eq__(self, other):
        if isinstance(other, str):
            return self.winner == other
        return NotImplemented


class _Budget:
    def __init__(self, cap):
        self.cap = DEFAULT_NODE_CAP if cap is None else cap
        self.nodes = 0

    def tick(self):
        self.nodes += 1
        if self.nodes > self.cap:
            raise BudgetExceeded(self.nodes)


def _check_sides(A, B):
    A, B = list(A), list(B)
    if not A or not B:
        raise ValueError("both sides need at least one structure")
    schemas = {s.schema for s in A + B}
    if len(schemas) != 1:
        raise ValueError("all structures must share one schema")
    return A, B


def _choices(option_lists):
    """Distinct sets obtainable by picking one option from each list."""
    seen = set()
    for combo in product(*option_lists):
        key = frozenset(combo)
        if key not in seen:
            seen.add(key)
            yield key


# -- MS game (fresh pebbles, oblivious Duplicator) ----------------------------

class _MSSolver:
    """Positions are sets of prefix-mode types; dead positions are dropped."""

    def __init__(self, A, B, r, policy, node_cap, depth=None):
        self.ti = TypeIndex(A + B, r if depth is None else depth, mode="prefix")
        self.r = r
        self.policy = policy
        self.budget = _Budget(node_cap)
        self.memo: dict = {}
        self._width: dict = {}
        self.left0 = frozenset(self.ti.type(self.ti.root(i), r) for i in range(len(A)))
        self.right0 = frozenset(self.ti.type(self.ti.root(len(A) + i), r) for i in range(len(B)))

    def t0(self, tid, j):
        return self.ti.t0_of(tid, j)

    def kids(self, tid, j):
        item = self.ti.representative(tid, j)
        colors = self.ti.move_colors(item)
        if not colors:
            return {}
        return self.ti.children(item, colors[0], j - 1)

    def prune(self, L, R, j):
        l0 = {self.t0(x, j) for x in L}
        r0 = {self.t0(y, j) for y in R}
        return frozenset(x for x in L if self.t0(x, j) in r0), frozenset(y for y in R if self.t0(y, j) in l0)

    def spoiler_options(self, tid, j, restricted):
        item = self.ti.representative(tid, j)
        out = []
        for child, e in self.kids(tid, j).items():
            if restricted and self.ti.is_on_top(item, e):
                continue
            out.append(child)
        return out

    def solve(self, L, R, j):
        self.budget.tick()
        L, R = self.prune(L, R, j)
        if not L:
            return True
        if j == 0 or (L & R):
            return False
        key = (L, R, j)
        if key in self.memo:
            return self.memo[key] is not False
        self.memo[key] = False
        for side in self.side_order(L, R, j):
            move = self.try_side(L, R, j, side)
            if move is not None:
                self.memo[key] = move
                return True
        return False

    def side_order(self, L, R, j):
        # playing into the side with more placements tends to win sooner; ties keep left first
        def width(S):
            total = 0
            for x in S:
                w = self._width.get((x, j))
                if w is None:
                    w = self._width[(x, j)] = len(self.kids(x, j))
                total += w
            return total
        return ("right", "left") if width(R) > width(L) else ("left", "right")

    def try_side(self, L, R, j, side):
        S, D = (L, R) if side == "left" else (R, L)
        restricted = OnTopPolicy.forbids(self.policy, side)
        Dn = frozenset(c for y in sorted(D) for c in self.kids(y, j))
        Dn0 = {self.t0(c, j - 1) for c in Dn}
        fixed, open_items = {}, []
        for x in sorted(S):
            opts = [o for o in self.spoiler_options(x, j, restricted) if o not in Dn]
            dead = [o for o in opts if self.t0(o, j - 1) not in Dn0]
            if dead:
                fixed[x] = dead[0]
            elif not opts:
                return None
            else:
                open_items.append((x, opts))
        if not open_items:
            return (side, fixed)
        if j - 1 == 0:
            return None
        for pick in product(*[opts for _, opts in open_items]):
            Sn = frozenset(pick)
            won = self.solve(Sn, Dn, j - 1) if side == "left" else self.solve(Dn, Sn, j - 1)
            if won:
                choice = dict(fixed)
                choice.update({x: o for (x, _), o in zip(open_items, pick)})
                return (side, choice)
        return None


def decide_ms(A: Iterable[Structure], B: Iterable[Structure], r: int, node_cap=None) -> GameResult:
    return decide_ms_no_on_top(A, B, r, OnTopPolicy.UNRESTRICTED, node_cap=node_cap, _allow_unrestricted=True)


def decide_ms_no_on_top(A, B, r: int, policy: str = OnTopPolicy.FORBID_BOTH, node_cap=None,
                        _allow_unrestricted=False) -> GameResult:
    A, B = _check_sides(A, B)
    if r < 0:
        raise ValueError("r must be non-negative")
    if policy == OnTopPolicy.UNRESTRICTED and not _allow_unrestricted:
        raise ValueError("use decide_ms for the unrestricted game")
    solver = _MSSolver(A, B, r, policy, node_cap)
    won = solver.solve(solver.left0, solver.right0, r)
    return GameResult(SPOILER if won else DUPLICATOR, solver.budget.nodes)


def ms_best_move(left, right, rounds: int, policy: str = OnTopPolicy.UNRESTRICTED, node_cap=None):
    """Solve an MS position given by pebbled structures carrying colors 1..t.

    Returns (winner, move). For a Spoiler win that is not already settled,
    move is (side, elements) with one element per structure on that side,
    in the order given.
    """
    left, right = list(left), list(right)
    t = {len(p.assignment) for p in left + right}
    if len(t) != 1 or any(p.colors != frozenset(range(1, len(p.assignment) + 1)) for p in left + right):
        raise ValueError("positions must carry colors 1..t on both sides")
    t = t.pop()
    structs = []
    for p in left + right:
        if p.structure not in structs:
            structs.append(p.structure)
    solver = _MSSolver([], structs, 0, policy, node_cap, depth=t + rounds)
    ti = solver.ti

    def item(p):
        return (structs.index(p.structure), tuple(p.element(c) for c in range(1, t + 1)))

    L = frozenset(ti.type(item(p), rounds) for p in left)
    R = frozenset(ti.type(item(p), rounds) for p in right)
    if not solver.solve(L, R, rounds):
        return DUPLICATOR, None
    key = solver.prune(L, R, rounds) + (rounds,)
    if not key[0]:
        return SPOILER, None
    side, choice = solver.memo[key]
    restricted = OnTopPolicy.forbids(policy, side)
    elements = []
    for p in (left if side == "left" else right):
        x = item(p)
        allowed = [e for e in range(p.structure.size) if not (restricted and ti.is_on_top(x, e))]
        want = choice.get(ti.type(x, rounds))
        if want is not None:
            allowed = [e for e in allowed if ti.type(ti.place(x, t + 1, e), rounds - 1) == want]
        elements.append(allowed[0])
    return SPOILER, (side, elements)


# -- MS game with repebbling ------------------------------------------------

class _ColorGameBase:
    def __init__(self, A, B, r, k, node_cap):
        if k < 1:
            raise ValueError("k must be at least 1")
        self.ti = TypeIndex(A + B, k, mode="colors")
        self.k = k
        self.r = r
        self.budget = _Budget(node_cap)
        self.memo: dict = {}
        self.nA = len(A)
        self.nB = len(B)

    def root_types(self, j):
        L = [self.ti.type(self.ti.root(i), j) for i in range(self.nA)]
        R = [self.ti.type(self.ti.root(self.nA + i), j) for i in range(self.nB)]
        return L, R

    def t0(self, tid, j):
        return self.ti.t0_of(tid, j)

    def colors(self, tid, j):
        dom = self.ti.domain(self.ti.representative(tid, j))
        fresh = [c for c in range(1, self.k + 1) if c not in dom]
        return list(dom) + fresh[:1]

    def kids(self, tid, color, j):
        return self.ti.children(self.ti.representative(tid, j), color, j - 1)


class _RepebbleSolver(_ColorGameBase):
    def solve(self, L, R, j):
        self.budget.tick()
        if not ({self.t0(x, j) for x in L} & {self.t0(y, j) for y in R}):
            return True
        if j == 0 or (L & R):
            return False
        key = (L, R, j)
        if key in self.memo:
            return self.memo[key]
        self.memo[key] = False
        any_item = next(iter(L))
        for side in ("left", "right"):
            S, D = (L, R) if side == "left" else (R, L)
            for c in self.colors(any_item, j):
                Dn = frozenset(ch for y in D for ch in self.kids(y, c, j))
                Dn0 = {self.t0(ch, j - 1) for ch in Dn}
                opt_lists = []
                all_dead = True
                for x in sorted(S):
                    opts = [o for o in self.kids(x, c, j) if o not in Dn]
                    if not opts:
                        break
                    if not any(self.t0(o, j - 1) not in Dn0 for o in opts):
                        all_dead = False
                    opt_lists.append(opts)
                else:
                    if all_dead:
                        self.memo[key] = True
                        return True
                    if j - 1 == 0:
                        continue
                    for Sn in _choices(opt_lists):
                        won = self.solve(Sn, Dn, j - 1) if side == "left" else self.solve(Dn, Sn, j - 1)
                        if won:
                            self.memo[key] = True
                            return True
        return False


def decide_ms_repebbling(A, B, r: int, k: int, node_cap=None) -> GameResult:
    A, B = _check_sides(A, B)
    solver = _RepebbleSolver(A, B, r, k, node_cap)
    L, R = solver.root_types(r)
    won = solver.solve(frozenset(L), frozenset(R), r)
    return GameResult(SPOILER if won else DUPLICATOR, solver.budget.nodes)


# -- hereditary MS game with repebbling --------------------------------------

@dataclass(frozen=True)
class LineagePair:
    left: int
    right: int


def _canonical_state(left, right, edges):
    """Drop isolated nodes, merge interchangeable nodes, and order the rest.

    left/right are lists of labels; edges a set of LineagePair over indices.
    Nodes with the same label and the same neighbours are interchangeable.
    """
    while True:
        used_l = sorted({p.left for p in edges})
        used_r = sorted({p.right for p in edges})
        nbr_l = {i: frozenset(p.right for p in edges if p.left == i) for i in used_l}
        sig_l = {}
        for i in used_l:
            sig_l.setdefault((left[i], nbr_l[i]), i)
        nbr_r = {j: frozenset(p.left for p in edges if p.right == j) for j in used_r}
        sig_r = {}
        for j in used_r:
            sig_r.setdefault((right[j], nbr_r[j]), j)
        keep_l = set(sig_l.values())
        keep_r = set(sig_r.values())
        new_edges = {p for p in edges if p.left in keep_l and p.right in keep_r}
        if new_edges == edges and len(keep_l) == len(used_l) and len(keep_r) == len(used_r):
            break
        edges = new_edges
    # order nodes by label and neighbour labels, then renumber
    lk = {i: (left[i], tuple(sorted(right[j] for j in nbr_l[i]))) for i in used_l}
    rk = {j: (right[j], tuple(sorted(left[i] for i in nbr_r[j]))) for j in used_r}
    order_l = sorted(used_l, key=lambda i: (lk[i], i))
    order_r = sorted(used_r, key=lambda j: (rk[j], j))
    ml = {i: n for n, i in enumerate(order_l)}
    mr = {j: n for n, j in enumerate(order_r)}
    new_left = tuple(left[i] for i in order_l)
    new_right = tuple(right[j] for j in order_r)
    new_edges = frozenset(LineagePair(ml[p.left], mr[p.right]) for p in edges)
    return new_left, new_right, new_edges


class _HereditarySolver(_ColorGameBase):
    def solve(self, left, right, edges, j):
        self.budget.tick()
        if not edges:
            return True
        if j == 0:
            return False
        if any(left[p.left] == right[p.right] for p in edges):
            return False
        key = (left, right, edges, j)
        if key in self.memo:
            return self.memo[key]
        self.memo[key] = False
        any_item = left[0]
        for side in ("left", "right"):
            for c in self.colors(any_item, j):
                if self.try_move(left, right, edges, j, side, c):
                    self.memo[key] = True
                    return True
        return False

    def try_move(self, left, right, edges, j, side, c):
        if side == "left":
            S, D = left, right
            nbrs = {i: [p.right for p in edges if p.left == i] for i in range(len(S))}
        else:
            S, D = right, left
            nbrs = {i: [p.left for p in edges if p.right == i] for i in range(len(S))}
        # Duplicator: one new node per (parent, distinct child type)
        dkids = {v: sorted(self.kids(D[v], c, j)) for v in range(len(D))}
        d_nodes = [(v, ch) for v in range(len(D)) for ch in dkids[v]]
        d_index = {n: i for i, n in enumerate(d_nodes)}
        open_items = []
        for u in range(len(S)):
            opts = []
            dead = False
            for o in sorted(self.kids(S[u], c, j)):
                o0 = self.t0(o, j - 1)
                if any(o in dkids[v] for v in nbrs[u]):
                    continue  # Duplicator keeps an equivalent position on this lineage
                links = [d_index[(v, ch)] for v in nbrs[u] for ch in dkids[v] if self.t0(ch, j - 1) == o0]
                if not links:
                    dead = True
                    break
                opts.append((o, links))
            if dead:
                continue
            if not opts:
                return False
            open_items.append(opts)
        if not open_items:
            return True
        if j - 1 == 0:
            return False
        d_labels = [ch for _, ch in d_nodes]
        seen = set()
        for pick in product(*open_items):
            s_labels = [o for o, _ in pick]
            if side == "left":
                raw = {LineagePair(n, d) for n, (_, links) in enumerate(pick) for d in links}
                state = _canonical_state(s_labels, d_labels, raw)
            else:
                raw = {LineagePair(d, n) for n, (_, links) in enumerate(pick) for d in links}
                state = _canonical_state(d_labels, s_labels, raw)
            if state in seen:
                continue
            seen.add(state)
            if self.solve(*state, j - 1):
                return True
        return False


def decide_ms_hereditary(A, B, r: int, k: int, node_cap=None) -> GameResult:
    A, B = _check_sides(A, B)
    solver = _HereditarySolver(A, B, r, k, node_cap)
    L, R = solver.root_types(r)
    edges = {LineagePair(i, j) for i in range(len(L)) for j in range(len(R))
             if solver.t0(L[i], r) == solver.t0(R[j], r)}
    won = solver.solve(*_canonical_state(L, R, edges), r)
    return GameResult(SPOILER if won else DUPLICATOR, solver.budget.nodes)


# -- MS game without duplication ---------------------------------------------

def _distributions(count, options):
    """Multisets of size count over options, as tuples of (option, multiplicity)."""
    if not options:
        return
    if len(options) == 1:
        yield ((options[0], count),)
        return
    first, rest = options[0], options[1:]
    for m in range(count, -1, -1):
        for tail in _distributions(count - m, rest):
            yield (((first, m),) if m else ()) + tail


class _NoDupSolver(_MSSolver):
    def prune_counts(self, L, R, j):
        l0 = {self.t0(x, j) for x in L}
        r0 = {self.t0(y, j) for y in R}
        return ({x: n for x, n in L.items() if self.t0(x, j) in r0},
                {y: n for y, n in R.items() if self.t0(y, j) in l0})

    def solve_counts(self, L, R, j):
        self.budget.tick()
        L, R = self.prune_counts(L, R, j)
        if not L:
            return True
        if j == 0 or (set(L) & set(R)):
            return False
        key = (tuple(sorted(L.items())), tuple(sorted(R.items())), j)
        if key in self.memo:
            return self.memo[key]
        self.memo[key] = False
        for side in ("left", "right"):
            if self.try_side_counts(L, R, j, side):
                self.memo[key] = True
                return True
        return False

    def try_side_counts(self, L, R, j, side):
        S, D = (L, R) if side == "left" else (R, L)
        dkids = {y: sorted(self.kids(y, j)) for y in D}
        Dn = {c for cs in dkids.values() for c in cs}
        Dn0 = {self.t0(c, j - 1) for c in Dn}
        fixed, open_items = {}, []
        for x in sorted(S):
            opts = [o for o in sorted(self.kids(x, j)) if o not in Dn]
            dead = [o for o in opts if self.t0(o, j - 1) not in Dn0]
            if dead:
                continue
            if not opts:
                return False
            open_items.append((x, opts))
        if not open_items:
            return True
        if j - 1 == 0:
            return False
        spoiler_moves = product(*[list(_distributions(S[x], opts)) for x, opts in open_items])
        dup_moves = [list(_distributions(n, dkids[y])) for y, n in sorted(D.items())]
        for smove in spoiler_moves:
            Sn = Counter()
            for dist in smove:
                for o, m in dist:
                    Sn[o] += m
            survived = False
            seen = set()
            for dmove in product(*dup_moves):
                Dn_c = Counter()
                for dist in dmove:
                    for o, m in dist:
                        Dn_c[o] += m
                k = tuple(sorted(Dn_c.items()))
                if k in seen:
                    continue
                seen.add(k)
                won = (self.solve_counts(dict(Sn), dict(Dn_c), j - 1) if side == "left"
                       else self.solve_counts(dict(Dn_c), dict(Sn), j - 1))
                if not won:
                    survived = True
                    break
            if not survived:
                return True
        return False


def decide_ms_no_duplication(A: Sequence[tuple[Structure, int]] | Counter, B, r: int, node_cap=None) -> GameResult:
    """A and B are multisets given as (structure, multiplicity) pairs or Counters."""
    A = list(A.items()) if isinstance(A, Counter) else list(A)
    B = list(B.items()) if isinstance(B, Counter) else list(B)
    if not A or not B:
        raise ValueError("both sides need at least one structure")
    if any(m < 1 for _, m in A + B):
        raise ValueError("multiplicities must be positive")
    structs_a = [s for s, _ in A]
    structs_b = [s for s, _ in B]
    _check_sides(structs_a, structs_b)
    solver = _NoDupSolver(structs_a, structs_b, r, OnTopPolicy.UNRESTRICTED, node_cap)
    L, R = Counter(), Counter()
    for i, (_, m) in enumerate(A):
        L[solver.ti.type(solver.ti.root(i), r)] += m
    for i, (_, m) in enumerate(B):
        R[solver.ti.type(solver.ti.root(len(A) + i), r)] += m
    won = solver.solve_counts(dict(L), dict(R), r)
    return GameResult(SPOILER if won else DUPLICATOR, solver.budget.nodes)


# -- literal MS searches (reference implementations for small inputs) ---------

def _sig(s: Structure, elems) -> tuple:
    return atomic_signature(s, list(s.constants) + list(elems))


def _literal_alive(L, R):
    ls = {_sig(s, a) for s, a in L}
    rs = {_sig(s, a) for s, a in R}
    return {x for x in L if _sig(*x) in rs}, {y for y in R if _sig(*y) in ls}


def decide_ms_literal(A, B, r: int) -> GameResult:
    """MS game over literal pebbled structures with the oblivious Duplicator."""
    A, B = _check_sides(A, B)
    memo = {}

    def win(L, R, j):
        L, R = _literal_alive(L, R)
        if not L:
            return True
        if j == 0:
            return False
        key = (frozenset(L), frozenset(R), j)
        if key in memo:
            return memo[key]
        res = False
        for S, D, left in ((L, R, True), (R, L, False)):
            Dn = {(s, a + (e,)) for s, a in D for e in range(s.size)}
            items = sorted(S, key=lambda x: (id(x[0]), x[1]))
            for pick in product(*[range(s.size) for s, _ in items]):
                Sn = {(s, a + (e,)) for (s, a), e in zip(items, pick)}
                if (win(Sn, Dn, j - 1) if left else win(Dn, Sn, j - 1)):
                    res = True
                    break
            if res:
                break
        memo[key] = res
        return res

    won = win({(s, ()) for s in A}, {(s, ()) for s in B}, r)
    return GameResult(SPOILER if won else DUPLICATOR)


def _nonempty_subsets(n):
    for mask in range(1, 1 << n):
        yield [e for e in range(n) if mask >> e & 1]


def decide_ms_full_duplicator(A, B, r: int) -> GameResult:
    """MS game where Duplicator picks any nonempty set of placements per structure."""
    A, B = _check_sides(A, B)

    def win(L, R, j):
        L, R = _literal_alive(L, R)
        if not L:
            return True
        if j == 0:
            return False
        for S, D, left in ((L, R, True), (R, L, False)):
            S, D = sorted(S, key=lambda x: (id(x[0]), x[1])), sorted(D, key=lambda x: (id(x[0]), x[1]))
            for pick in product(*[range(s.size) for s, _ in S]):
                Sn = {(s, a + (e,)) for (s, a), e in zip(S, pick)}
                beaten = True
                for resp in product(*[list(_nonempty_subsets(s.size)) for s, _ in D]):
                    Dn = {(s, a + (e,)) for (s, a), es in zip(D, resp) for e in es}
                    if not (win(Sn, Dn, j - 1) if left else win(Dn, Sn, j - 1)):
                        beaten = False
                        break
                if beaten:
                    return True
        return False

    won = win({(s, ()) for s in A}, {(s, ()) for s in B}, r)
    return GameResult(SPOILER if won else DUPLICATOR)


# -- EF games -----------------------------------------------------------------

def _partial_iso(A, B, a, b) -> bool:
    return _sig(A, [e for e in a if e != UNSET]) == _sig(B, [e for e in b if e != UNSET]) and \
        [e == UNSET for e in a] == [e == UNSET for e in b]


def decide_ef(A: Structure, B: Structure, r: int) -> GameResult:
    """Classical r-round EF game; pebble t is used in round t."""
    if A.schema != B.schema:
        raise ValueError("structures must share a schema")
    memo = {}
    count = [0]

    def spoiler(a, b):
        count[0] += 1
        if not _partial_iso(A, B, a, b):
            return True
        if len(a) == r:
            return False
        key = (a, b)
        if key not in memo:
            memo[key] = any(
                all(spoiler(a + (x,), b + (y,)) for y in range(B.size)) for x in range(A.size)
            ) or any(
                all(spoiler(a + (x,), b + (y,)) for x in range(A.size)) for y in range(B.size)
            )
        return memo[key]

    won = spoiler((), ())
    return GameResult(SPOILER if won else DUPLICATOR, count[0])


def decide_ef_rk(A: Structure, B: Structure, r: int, k: int) -> GameResult:
    """r-round EF game with k reusable pebbles."""
    if A.schema != B.schema:
        raise ValueError("structures must share a schema")
    if k < 1:
        raise ValueError("k must be at least 1")
    memo = {}
    count = [0]

    def put(t, c, e):
        t = list(t)
        t[c] = e
        return tuple(t)

    def spoiler(a, b, j):
        count[0] += 1
        if not _partial_iso(A, B, a, b):
            return True
        if j == 0:
            return False
        key = (a, b, j)
        if key not in memo:
            res = False
            for c in range(k):
                if any(all(spoiler(put(a, c, x), put(b, c, y), j - 1) for y in range(B.size))
                       for x in range(A.size)):
                    res = True
                    break
                if any(all(spoiler(put(a, c, x), put(b, c, y), j - 1) for x in range(A.size))
                       for y in range(B.size)):
                    res = True
                    break
            memo[key] = res
        return memo[key]

    won = spoiler((UNSET,) * k, (UNSET,) * k, r)
    return GameResult(SPOILER if won else DUPLICATOR, count[0])


def decide_pebble(A: Structure, B: Structure, k: int) -> GameResult:
    """Unbounded k-pebble game as a greatest fixpoint over position pairs."""
    if A.schema != B.schema:
        raise ValueError("structures must share a schema")
    if k < 1:
        raise ValueError("k must be at least 1")

    def positions(S):
        return list(product(range(-1, S.size), repeat=k))

    def sig(S, a):
        return (tuple(e == UNSET for e in a), _sig(S, [e for e in a if e != UNSET]))

    by_sig: dict = {}
    for b in positions(B):
        by_sig.setdefault(sig(B, b), []).append(b)
    alive = {(a, b) for a in positions(A) for b in by_sig.get(sig(A, a), [])}

    def put(t, c, e):
        t = list(t)
        t[c] = e
        return tuple(t)

    changed = True
    rounds = 0
    while changed:
        changed = False
        rounds += 1
        for a, b in list(alive):
            ok = True
            for c in range(k):
                forth = all(any((put(a, c, x), put(b, c, y)) in alive for y in range(B.size)) for x in range(A.size))
                back = all(any((put(a, c, x), put(b, c, y)) in alive for x in range(A.size)) for y in range(B.size))
                if not (forth and back):
                    ok = False
                    break
            if not ok:
                alive.discard((a, b))
                changed = True
    empty = ((UNSET,) * k, (UNSET,) * k)
    return GameResult(DUPLICATOR if empty in alive else SPOILER, rounds)
