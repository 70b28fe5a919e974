"""Named structures and sentences used throughout the workbench and its tests."""

from __future__ import annotations

from .formulas import parse_formula
from .structures import Schema, Structure, gen_linear_order, gen_rooted_tree

# parent lists; node 0 is the root
RT3_PARENTS = [None, 0, 1, 0, 3]        # L1; L11 < L1, L12 < L11; L21 < L1, L22 < L21
RT4_PARENTS = [None, 0, 1, 2, 0, 4]     # B1; B11, B12, B13 chain; B21, B22 chain
RT3_LABELS = ["L1", "L11", "L12", "L21", "L22"]
RT4_LABELS = ["B1", "B11", "B12", "B13", "B21", "B22"]


def LO(n: int) -> Structure:
    return gen_linear_order(n)


def RT3() -> Structure:
    return gen_rooted_tree(RT3_PARENTS, name="RT(3)")


def RT4() -> Structure:
    return gen_rooted_tree(RT4_PARENTS, name="RT(4)")


COLOR_SCHEMA = Schema(relations=(("R", 1), ("G", 1)))


def two_color_structures() -> tuple[Structure, Structure, Structure]:
    """A has a red and a green element; B is one red element; C is one green element."""
    A = Structure.build(COLOR_SCHEMA, 2, {"R": [(0,)], "G": [(1,)]}, name="A")
    B = Structure.build(COLOR_SCHEMA, 1, {"R": [(0,)]}, name="B")
    C = Structure.build(COLOR_SCHEMA, 1, {"G": [(0,)]}, name="C")
    return A, B, C


# Element with something below it and something above it.
MIDDLE_ELEMENT_TEXT = "EX x1 . (EX x2 . x2<x1 & EX x2 . x1<x2)"

# Every element has two smaller or two larger elements.
EVERY_TWO_SIDE_TEXT = "ALL x1 . EX x2 . EX x3 . ((x1<x2 & x2<x3) | (x2<x3 & x3<x1))"

# Some element has one smaller element and two larger elements.
ONE_BELOW_TWO_ABOVE_TEXT = (
    "EX x1 . ALL x2 . EX x3 . (((!x2<x1 | x1<x3) & (!x1<x2 | (!x3=x2 & x1<x3))) & (!x2=x1 | x3<x1))"
)

# Every element has two larger, or two smaller, or two distinct incomparable elements.
TWO_SIDE_OR_INCOMPARABLE_TEXT = (
    "ALL x1 . EX x2 . EX x3 . (((x1<x2 & x2<x3) | (x2<x3 & x3<x1)) | "
    "(((!x1<x2 & !x2<x1) & !x1=x2) & (((!x1<x3 & !x3<x1) & !x1=x3) & !x2=x3)))"
)

# Rank 3 with two variables, separating LO(4) from LO(3).
RANK3_TWO_VAR_TEXT = "EX x1 . (EX x2 . x2<x1 & EX x2 . (x1<x2 & EX x1 . x2<x1))"


def sentence(text: str):
    return parse_formula(text)


def middle_element():
    return sentence(MIDDLE_ELEMENT_TEXT)


def every_two_side():
    return sentence(EVERY_TWO_SIDE_TEXT)


def one_below_two_above():
    return sentence(ONE_BELOW_TWO_ABOVE_TEXT)


def two_side_or_incomparable():
    return sentence(TWO_SIDE_OR_INCOMPARABLE_TEXT)


def rank3_two_var():
    return sentence(RANK3_TWO_VAR_TEXT)
