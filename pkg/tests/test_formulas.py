import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msgames.evaluation import DomainError, UnboundVariableError, evaluate, is_separating, separation_failure
from msgames.formulas import (
    And, Atom, Const, Exists, Forall, FormulaSchemaError, FormulaSyntaxError, Not, Or, Var,
    all_vars, eq, free_vars, is_prenex, is_sentence, negate_prenex, normalize, parse_formula,
    print_formula, quantifier_count, rel, split_prenex, to_prenex, x,
)
from msgames.instances import (
    EVERY_TWO_SIDE_TEXT, LO, MIDDLE_ELEMENT_TEXT, RT3, RT4, every_two_side, middle_element,
    one_below_two_above, two_side_or_incomparable,
)
from msgames.structures import ORDER_SCHEMA, PebbledStructure, Schema, Structure, pebble

SCHEMA = Schema(relations=(("<", 2), ("R", 1)), constants=("c",))


def test_parse_middle_element():
    f = parse_formula(MIDDLE_ELEMENT_TEXT)
    less = lambda a, b: rel("<", x(a), x(b))
    assert f == Exists(1, And(Exists(2, less(2, 1)), Exists(2, less(1, 2))))
    assert quantifier_count(f) == 3


def test_parse_every_two_side_prefix():
    prefix, _ = split_prenex(parse_formula(EVERY_TWO_SIDE_TEXT))
    assert [q for q, _ in prefix] == [Forall, Exists, Exists]


def test_parse_other_atoms():
    f = parse_formula("ALL x1 . (R(x1) | (!x1=c & c<x1))", SCHEMA)
    assert f == Forall(1, Or(rel("R", x(1)), And(Not(eq(x(1), Const("c"))), rel("<", Const("c"), x(1)))))


@pytest.mark.parametrize("text", ["EX x1 .", "(x1<x2 & x2<x1", "x1<x2 & x2<x1", "EX y . x1<x1", "x1 <", "!", "x1<x2)"])
def test_syntax_errors(text):
    with pytest.raises(FormulaSyntaxError) as err:
        parse_formula(text)
    assert err.value.position >= 0


def test_schema_errors():
    with pytest.raises(FormulaSchemaError):
        parse_formula("S(x1)", SCHEMA)
    with pytest.raises(FormulaSchemaError):
        parse_formula("R(x1,x2)", SCHEMA)
    with pytest.raises(FormulaSchemaError):
        parse_formula("x1=d", SCHEMA)


def test_free_and_bound_variables():
    f = parse_formula("(x3<x1 & EX x1 . x1<x2)")
    assert free_vars(f) == {1, 2, 3}
    assert all_vars(f) == {1, 2, 3}
    assert is_sentence(parse_formula(MIDDLE_ELEMENT_TEXT))
    assert not is_sentence(f)


# -- random formulas for round trips and prenex checks --------------------------

terms = st.one_of(st.integers(1, 3).map(Var), st.just(Const("c")))
atoms = st.one_of(
    st.tuples(terms, terms).map(lambda t: Atom("<", t)),
    st.tuples(terms, terms).map(lambda t: Atom("=", t)),
    terms.map(lambda t: Atom("R", (t,))),
)
formulas = st.recursive(
    atoms,
    lambda sub: st.one_of(
        sub.map(Not),
        st.tuples(sub, sub).map(lambda p: And(*p)),
        st.tuples(sub, sub).map(lambda p: Or(*p)),
        st.tuples(st.integers(1, 3), sub).map(lambda p: Exists(*p)),
        st.tuples(st.integers(1, 3), sub).map(lambda p: Forall(*p)),
    ),
    max_leaves=8,
)


@settings(max_examples=200)
@given(formulas)
def test_print_parse_round_trip(f):
    text = print_formula(f)
    assert parse_formula(text, SCHEMA) == f
    assert normalize(text) == text


def _small_structures():
    out = []
    for n in (1, 2, 3):
        for cval in range(n):
            for rset in ({0}, set(range(n))):
                out.append(Structure.build(SCHEMA, n, {"<": [(i, j) for i in range(n) for j in range(n) if i < j],
                                                       "R": [(e,) for e in rset]}, {"c": cval}))
    out.append(Structure.build(SCHEMA, 4, {"<": [(1, 0), (2, 0), (3, 2)], "R": [(3,)]}, {"c": 2}))
    return out


STRUCTS = _small_structures()


@settings(max_examples=500)
@given(formulas, st.sampled_from(STRUCTS), st.lists(st.integers(0, 3), min_size=3, max_size=3))
def test_negation_and_prenex_preserve_truth(f, s, elems):
    p = PebbledStructure(s, {i + 1: e % s.size for i, e in enumerate(elems)})
    value = evaluate(f, p)
    assert evaluate(Not(f), p) == (not value)
    g = to_prenex(f)
    assert is_prenex(g)
    assert evaluate(g, p) == value
    if is_prenex(f) and is_sentence(f):
        assert evaluate(negate_prenex(f), p) == (not value)


# -- evaluation ------------------------------------------------------------------

def test_reference_sentences_on_orders_and_trees():
    phi_all = every_two_side()
    assert evaluate(phi_all, LO(4)) and not evaluate(phi_all, LO(3))
    phi_ex = one_below_two_above()
    assert evaluate(phi_ex, RT4()) and evaluate(phi_ex, LO(4))
    assert not evaluate(phi_ex, RT3()) and not evaluate(phi_ex, LO(3))
    psi = two_side_or_incomparable()
    assert all(evaluate(psi, s) for s in (RT4(), LO(4)))
    assert not evaluate(psi, LO(3))


def test_reflexive_equality_always_holds():
    f = eq(x(1), x(1))
    assert all(evaluate(f, pebble(LO(3), e)) for e in range(3))


def test_unbound_variable_is_reported():
    with pytest.raises(UnboundVariableError) as err:
        evaluate(parse_formula("x1<x2"), pebble(LO(3), 0))
    assert err.value.args[0] == 2 or "2" in str(err.value)


def test_separation_is_directional():
    f = middle_element()
    assert is_separating(f, [LO(3)], [LO(2)])
    assert not is_separating(f, [LO(2)], [LO(3)])
    assert separation_failure(f, [LO(2)], [LO(3)])[0] == "left"
    assert is_separating(two_side_or_incomparable(), [RT4(), LO(4)], [LO(3)])


def test_separation_needs_common_domain():
    with pytest.raises(DomainError):
        is_separating(eq(x(1), x(1)), [pebble(LO(2), 0)], [PebbledStructure(LO(2))])
    with pytest.raises(UnboundVariableError):
        is_separating(eq(x(2), x(2)), [pebble(LO(2), 0)], [pebble(LO(3), 1)])
