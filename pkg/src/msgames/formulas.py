"""First-order formula syntax: AST, text grammar, printer and prenex helpers.

Grammar::

    formula := quant | bin | "!" formula | atom | "(" formula ")"
    quant   := ("EX" | "ALL") var "." formula
    bin     := "(" formula ("&" | "|") formula ")"
    atom    := name "(" term ("," term)* ")" | term "=" term | term "<" term
    term    := var | name
    var     := "x" digits
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .structures import Schema


@dataclass(frozen=True)
class Var:
    index: int

    def __str__(self):
        return f"x{self.index}"


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self):
        return self.name


Term = Union[Var, Const]
EQ = "="


@dataclass(frozen=True)
class Atom:
    """Relation atom, or equality when ``pred`` is ``"="``."""
    pred: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: int
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: int
    body: "Formula"


Formula = Union[Atom, Not, And, Or, Exists, Forall]
QUANTIFIERS = (Exists, Forall)


def eq(a: Term, b: Term) -> Atom:
    return Atom(EQ, (a, b))


def rel(name: str, *args: Term) -> Atom:
    return Atom(name, args)


def x(i: int) -> Var:
    return Var(i)


def implies(a, b):
    return Or(Not(a), b)


def conj(*parts):
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(*parts):
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def free_vars(f: Formula) -> frozenset:
    if isinstance(f, Atom):
        return frozenset(t.index for t in f.args if isinstance(t, Var))
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or)):
        return free_vars(f.left) | free_vars(f.right)
    return free_vars(f.body) - {f.var}


def all_vars(f: Formula) -> frozenset:
    """Every variable index occurring in f, bound or free."""
    if isinstance(f, Atom):
        return free_vars(f)
    if isinstance(f, Not):
        return all_vars(f.body)
    if isinstance(f, (And, Or)):
        return all_vars(f.left) | all_vars(f.right)
    return all_vars(f.body) | {f.var}


def constants_of(f: Formula) -> frozenset:
    if isinstance(f, Atom):
        return frozenset(t.name for t in f.args if isinstance(t, Const))
    if isinstance(f, Not):
        return constants_of(f.body)
    if isinstance(f, (And, Or)):
        return constants_of(f.left) | constants_of(f.right)
    return constants_of(f.body)


def is_sentence(f: Formula) -> bool:
    return not free_vars(f)


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, Atom):
        return True
    if isinstance(f, Not):
        return is_quantifier_free(f.body)
    if isinstance(f, (And, Or)):
        return is_quantifier_free(f.left) and is_quantifier_free(f.right)
    return False


def quantifier_count(f: Formula) -> int:
    if isinstance(f, Atom):
        return 0
    if isinstance(f, Not):
        return quantifier_count(f.body)
    if isinstance(f, (And, Or)):
        return quantifier_count(f.left) + quantifier_count(f.right)
    return 1 + quantifier_count(f.body)


# -- printing -------------------------------------------------------------

def print_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        if f.pred == EQ:
            return f"{f.args[0]}={f.args[1]}"
        if f.pred == "<" and len(f.args) == 2:
            return f"{f.args[0]}<{f.args[1]}"
        return f"{f.pred}({','.join(str(t) for t in f.args)})"
    if isinstance(f, Not):
        return "!" + print_formula(f.body)
    if isinstance(f, And):
        return f"({print_formula(f.left)} & {print_formula(f.right)})"
    if isinstance(f, Or):
        return f"({print_formula(f.left)} | {print_formula(f.right)})"
    q = "EX" if isinstance(f, Exists) else "ALL"
    return f"{q} x{f.var} . {print_formula(f.body)}"


# -- parsing --------------------------------------------------------------

class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class FormulaSchemaError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(?P<sym>[().,&|!=<])|(?P<name>[A-Za-z_][A-Za-z0-9_]*))")
_VAR = re.compile(r"^x(\d+)$")


def _tokenize(text: str):
    pos = 0
    toks = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        toks.append((m.group(m.lastgroup), start))
        pos = m.end()
    toks.append(("", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, schema: Schema | None):
        self.toks = _tokenize(text)
        self.i = 0
        self.schema = schema

    def peek(self, ahead=0):
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def take(self, expected=None):
        tok, pos = self.peek()
        if expected is not None and tok != expected:
            shown = tok or "end of input"
            raise FormulaSyntaxError(f"expected {expected!r} but found {shown!r}", pos)
        self.i += 1
        return tok, pos

    def formula(self):
        tok, pos = self.peek()
        if tok in ("EX", "ALL"):
            self.take()
            v = self.var()
            self.take(".")
            body = self.formula()
            return Exists(v, body) if tok == "EX" else Forall(v, body)
        if tok == "!":
            self.take()
            return Not(self.formula())
        if tok == "(":
            self.take()
            left = self.formula()
            op, _ = self.peek()
            if op in ("&", "|"):
                self.take()
                right = self.formula()
                self.take(")")
                return And(left, right) if op == "&" else Or(left, right)
            self.take(")")
            return left
        return self.atom()

    def var(self):
        tok, pos = self.take()
        m = _VAR.match(tok)
        if not m:
            raise FormulaSyntaxError(f"expected a variable but found {tok or 'end of input'!r}", pos)
        idx = int(m.group(1))
        if idx < 1:
            raise FormulaSyntaxError("variable indices start at 1", pos)
        return idx

    def term(self):
        tok, pos = self.take()
        if not tok or not (tok[0].isalpha() or tok[0] == "_") or tok in ("EX", "ALL"):
            raise FormulaSyntaxError(f"expected a term but found {tok or 'end of input'!r}", pos)
        m = _VAR.match(tok)
        if m:
            if int(m.group(1)) < 1:
                raise FormulaSyntaxError("variable indices start at 1", pos)
            return Var(int(m.group(1)))
        if self.schema is not None and tok not in self.schema.constants:
            raise FormulaSchemaError(f"unknown constant {tok!r} at position {pos}")
        return Const(tok)

    def atom(self):
        tok, pos = self.peek()
        nxt, _ = self.peek(1)
        if tok and (tok[0].isalpha() or tok[0] == "_") and nxt == "(" and not _VAR.match(tok):
            self.take()
            self.take("(")
            args = [self.term()]
            while self.peek()[0] == ",":
                self.take()
                args.append(self.term())
            self.take(")")
            self.check_relation(tok, len(args), pos)
            return Atom(tok, tuple(args))
        left = self.term()
        op, opos = self.take()
        if op not in ("=", "<"):
            raise FormulaSyntaxError(f"expected '=' or '<' but found {op or 'end of input'!r}", opos)
        right = self.term()
        if op == "=":
            return Atom(EQ, (left, right))
        self.check_relation("<", 2, opos)
        return Atom("<", (left, right))

    def check_relation(self, name, arity, pos):
        if self.schema is None:
            return
        if not self.schema.has_relation(name):
            raise FormulaSchemaError(f"unknown relation {name!r} at position {pos}")
        if self.schema.arity(name) != arity:
            raise FormulaSchemaError(
                f"relation {name!r} has arity {self.schema.arity(name)} but got {arity} arguments at position {pos}")


def parse_formula(text: str, schema: Schema | None = None) -> Formula:
    p = _Parser(text, schema)
    f = p.formula()
    tok, pos = p.peek()
    if tok:
        raise FormulaSyntaxError(f"trailing input {tok!r}", pos)
    return f


def normalize(text: str) -> str:
    return print_formula(parse_formula(text))


# -- prenex forms -----------------------------------------------------------

def is_prenex(f: Formula) -> bool:
    while isinstance(f, QUANTIFIERS):
        f = f.body
    return is_quantifier_free(f)


def split_prenex(f: Formula):
    """Return ([(quantifier class, var)], matrix) for a prenex formula."""
    prefix = []
    while isinstance(f, QUANTIFIERS):
        prefix.append((type(f), f.var))
        f = f.body
    if not is_quantifier_free(f):
        raise ValueError("formula is not in prenex form")
    return prefix, f


def build_prenex(prefix, matrix: Formula) -> Formula:
    out = matrix
    for q, v in reversed(prefix):
        out = q(v, out)
    return out


def negate_prenex(f: Formula) -> Formula:
    """Prenex form of the negation: dual quantifiers over the negated matrix."""
    prefix, matrix = split_prenex(f)
    dual = [(Forall if q is Exists else Exists, v) for q, v in prefix]
    return build_prenex(dual, Not(matrix))


def substitute(f: Formula, mapping: dict[int, int]) -> Formula:
    """Rename free variables according to mapping."""
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(Var(mapping.get(t.index, t.index)) if isinstance(t, Var) else t for t in f.args))
    if isinstance(f, Not):
        return Not(substitute(f.body, mapping))
    if isinstance(f, And):
        return And(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, Or):
        return Or(substitute(f.left, mapping), substitute(f.right, mapping))
    inner = {k: v for k, v in mapping.items() if k != f.var}
    return type(f)(f.var, substitute(f.body, inner))


def to_prenex(f: Formula) -> Formula:
    """Equivalent prenex formula; bound variables are renamed to fresh indices.

    Relies on nonempty universes (pulling a quantifier past a conjunct).
    """
    used = set(all_vars(f))
    counter = [max(used, default=0)]

    def fresh():
        counter[0] += 1
        return counter[0]

    def nnf(g, neg):
        if isinstance(g, Atom):
            return Not(g) if neg else g
        if isinstance(g, Not):
            return nnf(g.body, not neg)
        if isinstance(g, And):
            cls = Or if neg else And
            return cls(nnf(g.left, neg), nnf(g.right, neg))
        if isinstance(g, Or):
            cls = And if neg else Or
            return cls(nnf(g.left, neg), nnf(g.right, neg))
        if isinstance(g, Exists):
            return (Forall if neg else Exists)(g.var, nnf(g.body, neg))
        return (Exists if neg else Forall)(g.var, nnf(g.body, neg))

    def pull(g):
        if isinstance(g, (Atom, Not)):
            return [], g
        if isinstance(g, QUANTIFIERS):
            v = fresh()
            prefix, m = pull(substitute(g.body, {g.var: v}))
            return [(type(g), v)] + prefix, m
        lp, lm = pull(g.left)
        rp, rm = pull(g.right)
        return lp + rp, type(g)(lm, rm)

    prefix, matrix = pull(nnf(f, False))
    return build_prenex(prefix, matrix)
