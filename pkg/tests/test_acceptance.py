"""The thirteen acceptance criteria, each at its stated time bound."""

import random
import time
from contextlib import contextmanager
from itertools import permutations, product

import pytest

from conftest import ACCEPTANCE_LINES
from msgames.cli import random_tiny_instance
from msgames.evaluation import evaluate, is_separating
from msgames.follow import follow_sentence
from msgames.formulas import Exists, Forall, all_vars, negate_prenex
from msgames.games import (DUPLICATOR, SPOILER, decide_ef_rk, decide_ms, decide_ms_hereditary,
                           decide_ms_no_duplication, decide_ms_no_on_top, decide_ms_repebbling)
from msgames.instances import (LO, RT3, RT4, every_two_side, middle_element, one_below_two_above,
                               two_color_structures, two_side_or_incomparable)
from msgames.measures import F_Q, F_R, F_S, apply_measure
from msgames.rtypes import (NON_REPLICATING, REPLICATING, classify_sentence, classify_types,
                            enumerate_types, type_is_non_replicating)
from msgames.structures import ORDER_SCHEMA, OnTopPolicy, PebbledStructure, Structure
from msgames.synthesis import AT_MOST, EXACT, decide_qvt, decide_sg, min_measure, naive_oracle_sg

BOTH = OnTopPolicy.FORBID_BOTH


@contextmanager
def criterion(n, bound):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        within = elapsed < bound
        verdict = "PASS" if ok and within else "FAIL"
        line = f"{verdict} criterion {n} ({elapsed:.1f}s, bound {bound}s)"
        ACCEPTANCE_LINES.append(line)
        print(line)
    assert within, f"criterion {n} took {elapsed:.1f}s, bound {bound}s"


def _certificate_sound(res, A, B, r, k, m):
    f = res.certificate.formula
    assert is_separating(f, [PebbledStructure(s) for s in A], [PebbledStructure(s) for s in B])
    assert apply_measure(m, f) <= r
    assert all_vars(f) <= set(range(1, k + 1))
    return f


def test_criterion_01():
    with criterion(1, 1):
        assert decide_ms([LO(3)], [LO(2)], 2) == DUPLICATOR
        assert decide_ms([LO(3)], [LO(2)], 3) == SPOILER


def test_criterion_02():
    A, B, C = two_color_structures()
    with criterion(2, 1):
        assert decide_ms([A], [B], 1) == SPOILER
        assert decide_ms([A], [C], 1) == SPOILER
        assert decide_ms([A], [B, C], 1) == DUPLICATOR


def _order_structures_up_to_three():
    """One structure per isomorphism class of a binary relation on 1, 2 or 3 elements."""
    out = []
    for n in (1, 2, 3):
        seen = set()
        slots = list(product(range(n), repeat=2))
        for bits in product((0, 1), repeat=len(slots)):
            pairs = [t for t, b in zip(slots, bits) if b]
            key = min(tuple(sorted((p[a], p[b]) for a, b in pairs)) for p in permutations(range(n)))
            if key not in seen:
                seen.add(key)
                out.append(Structure.build(ORDER_SCHEMA, n, {"<": pairs}))
    return out


def test_criterion_03():
    with criterion(3, 60):
        assert decide_ms_no_duplication([(LO(3), 9)], [(LO(2), 4)], 2) == DUPLICATOR
        assert decide_ms([LO(3)], [LO(2)], 2) == DUPLICATOR
        structures = _order_structures_up_to_three()
        assert len(structures) == 116
        for a, b in product(structures, repeat=2):
            for r in (1, 2):
                want = decide_ms([a], [b], r).winner
                assert decide_ms_no_duplication([(a, a.size ** r)], [(b, b.size ** r)], r).winner == want


def test_criterion_04():
    A, B = [RT4(), LO(4)], [RT3(), LO(3)]
    with criterion(4, 120):
        assert decide_ms(A, B, 3) == SPOILER
        assert decide_ms_no_on_top(A, B, 3, BOTH) == DUPLICATOR


def test_criterion_05():
    with criterion(5, 60):
        assert decide_ms_no_on_top([RT4()], [RT3()], 3, BOTH) == SPOILER


def test_criterion_06():
    with criterion(6, 10):
        t1 = follow_sentence(every_two_side(), [LO(4)], [LO(3)])
        t2 = follow_sentence(two_side_or_incomparable(), [RT4(), LO(4)], [LO(3)])
        assert t1.spoiler_wins and t1.on_top_count == 0
        assert t2.spoiler_wins and t2.on_top_count == 0
        phi_all, phi_ex = every_two_side(), one_below_two_above()
        verdicts = [classify_sentence(f, ORDER_SCHEMA, "linear-order").verdict
                    for f in (phi_all, negate_prenex(phi_all), phi_ex, negate_prenex(phi_ex))]
        assert verdicts == [NON_REPLICATING, NON_REPLICATING, NON_REPLICATING, REPLICATING]


def test_criterion_07():
    with criterion(7, 10):
        assert decide_ms_repebbling([LO(3)], [LO(2)], 3, 2) == DUPLICATOR
        assert decide_ms_hereditary([LO(3)], [LO(2)], 3, 2) == SPOILER


def test_criterion_08():
    with criterion(8, 60):
        assert decide_qvt([LO(4)], [LO(3)], 3, 2) == DUPLICATOR
        assert decide_ms_hereditary([LO(4)], [LO(3)], 3, 2) == SPOILER


def test_criterion_09():
    with criterion(9, 5):
        res = decide_qvt([LO(3)], [LO(2)], 3, 2)
        assert res == SPOILER
        f = _certificate_sound(res, [LO(3)], [LO(2)], 3, 2, F_Q)
        mid = middle_element()
        assert all(evaluate(f, LO(n)) == evaluate(mid, LO(n)) for n in range(2, 6))


def test_criterion_10():
    with criterion(10, 30):
        res = decide_sg([LO(4)], [LO(3)], 3, 2, F_R)
        assert res == SPOILER
        f = _certificate_sound(res, [LO(4)], [LO(3)], 3, 2, F_R)
        assert apply_measure(F_R, f) == 3


def test_criterion_11():
    pool = [LO(2), LO(3), LO(4), RT3(), RT4()]
    with criterion(11, 120):
        for a, b in permutations(pool, 2):
            for r, k in product(range(1, 4), repeat=2):
                sg = decide_sg([a], [b], r, k, F_R)
                assert sg.winner == decide_ef_rk(a, b, r, k).winner
                if sg.spoiler_wins:
                    _certificate_sound(sg, [a], [b], r, k, F_R)


def _flip(quants):
    return [Forall if q is Exists else Exists for q in quants]


def _has_e_a_e(quants):
    seen = 0
    for q in quants:
        if seen < 3 and (q is Exists) == (seen != 1):
            seen += 1
    return seen == 3


def test_criterion_12():
    with criterion(12, 180):
        # certificate soundness on the Spoiler outcomes above
        for A, B, r, k, m in [([LO(3)], [LO(2)], 3, 2, F_Q), ([LO(4)], [LO(3)], 3, 2, F_R),
                              ([LO(3)], [LO(2)], 3, 3, F_Q), ([LO(3)], [LO(2)], 2, 2, F_R),
                              ([LO(4)], [LO(3)], 3, 3, F_Q)]:
            res = decide_sg(A, B, r, k, m)
            assert res == SPOILER
            _certificate_sound(res, A, B, r, k, m)
        # monotonicity and side swap
        A, B, C = two_color_structures()
        instances = [([LO(3)], [LO(2)]), ([LO(4)], [LO(3)]), ([RT4()], [RT3()]),
                     ([RT4(), LO(4)], [RT3(), LO(3)]), ([A], [B]), ([A], [C]), ([A], [B, C])]
        for X, Y in instances:
            prev = False
            for r in range(4):
                res = decide_ms(X, Y, r)
                assert res.winner == decide_ms(Y, X, r).winner
                assert res.spoiler_wins >= prev
                prev = res.spoiler_wins
                both = decide_ms_no_on_top(X, Y, r, BOTH).spoiler_wins if len(X + Y) < 4 else None
                if both is not None:
                    left = decide_ms_no_on_top(X, Y, r, OnTopPolicy.FORBID_LEFT).spoiler_wins
                    assert both <= left <= res.spoiler_wins
        # oracle agreement
        for m in (F_Q, F_R, F_S):
            rng = random.Random(20240611)
            for _ in range(200):
                X, Y, r, k = random_tiny_instance(rng)
                mode = rng.choice([AT_MOST, EXACT])
                assert decide_sg(X, Y, r, k, m, mode=mode).winner == naive_oracle_sg(X, Y, r, k, m, mode)
        # prefix property over all eight prefixes with sampled matrices
        types = enumerate_types(ORDER_SCHEMA, 3)
        rng = random.Random(7)
        for quants in product((Exists, Forall), repeat=3):
            flipped = _flip(quants)
            for _ in range(100):
                chosen, rest = [], []
                for t in types:
                    pos, neg = type_is_non_replicating(quants, t), type_is_non_replicating(flipped, t)
                    put = pos if pos != neg else rng.random() < 0.5
                    if rng.random() < 0.05:
                        put = not put
                    (chosen if put else rest).append(t)
                if classify_types(quants, chosen).verdict == NON_REPLICATING and \
                        classify_types(flipped, rest).verdict == NON_REPLICATING:
                    assert not _has_e_a_e(quants)


def test_criterion_13():
    with criterion(13, 60):
        assert min_measure([LO(3)], [LO(2)], 2, F_Q, 5).value == 3
        assert min_measure([LO(3)], [LO(2)], 2, F_R, 5).value == 2
        assert min_measure([LO(4)], [LO(3)], 3, F_Q, 5).value == 3
        assert decide_qvt([LO(4)], [LO(3)], 2, 3) == DUPLICATOR
