import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qoag.errors import FormulaSyntaxError
from qoag.logic.formula import (
    And,
    Exists,
    ForAll,
    InGo,
    IsZero,
    Le,
    Lt,
    Not,
    Or,
    Sim,
    Term,
    expand,
    free_vars,
    nnf,
    quantifier_rank,
    to_text,
)
from qoag.logic.generate import random_formula
from qoag.logic.parser import parse, parse_term


def test_parse_torsion_sentence():
    f = parse("EX x1. x1 + x1 = 0 & !(x1 = 0)")
    assert isinstance(f, Exists) and f.var == "x1"
    assert f.body == And((IsZero(Term.var("x1", 2)), Not(IsZero(Term.var("x1")))))


def test_parse_disjunction_of_atoms():
    f = parse("x1 <~ c1 | c1 << x1")
    assert f == Or((Le(Term.var("x1"), Term.var("c1")), Lt(Term.var("c1"), Term.var("x1"))))


def test_parse_universal():
    f = parse("ALL x1. 0 <~ x1")
    assert isinstance(f, ForAll) and f.body == Le(Term(), Term.var("x1"))
    assert quantifier_rank(f) == 1 and free_vars(f) == set()


def test_parse_derived_atoms():
    assert parse("x ~ y") == Sim(Term.var("x"), Term.var("y"))
    assert parse("x - y in Go") == InGo(Term.of({"x": 1, "y": -1}))
    assert parse("x = y") == IsZero(Term.of({"x": 1, "y": -1}))
    assert parse("x != 2*y") == Not(IsZero(Term.of({"x": 1, "y": -2})))
    assert parse("a = 0 -> b = 0") == Or((Not(IsZero(Term.var("a"))), IsZero(Term.var("b"))))


def test_term_canonical_form():
    t = parse_term("x2 + 3*x1 - x2 + x10 - (x1 - x9)")
    assert t.coeffs == (("x1", 2), ("x9", 1), ("x10", 1))
    assert str(t) == "2*x1 + x9 + x10"
    assert parse_term("x - x").is_zero


def test_quantifier_lists_and_scope():
    f = parse("EX x, y. x << y & y << 0")
    assert isinstance(f, Exists) and isinstance(f.body, Exists)
    assert free_vars(f) == set()


@pytest.mark.parametrize(
    "src, pos",
    [
        ("x1 <~", 5),
        ("EX . x = 0", 3),
        ("x1 <~ c1 |", 10),
        ("3 <~ x", 0),
        ("(x = 0", 6),
        ("x = 0 )", 6),
        ("x $ y", 2),
    ],
)
def test_syntax_errors_carry_positions(src, pos):
    with pytest.raises(FormulaSyntaxError) as e:
        parse(src)
    assert e.value.position == pos


def test_print_round_trip_examples():
    for src in [
        "EX x1. x1 + x1 = 0 & !(x1 = 0)",
        "x1 <~ c1 | c1 << x1",
        "ALL x. ALL y. x << y -> EX z. x << z & z << y",
        "(a = 0 | b = 0) & c = 0",
        "!(EX y. y ~ x) | x in Go",
    ]:
        f = parse(src)
        assert parse(to_text(f)) == f
        assert to_text(parse(to_text(f))) == to_text(f)


@settings(max_examples=200, deadline=None, derandomize=True)
@given(st.integers(0, 10**6))
def test_print_round_trip_random(seed):
    f = random_formula(random.Random(seed), ["x1", "x2", "c1"], rank=2, depth=3)
    text = to_text(f)
    assert parse(text) == f
    assert to_text(parse(text)) == text


def test_expand_derived_predicates():
    x = Term.var("x")
    assert expand(InGo(x)) == Or((IsZero(x), Not(And((Le(-x, x), Le(x, -x))))))
    assert expand(Lt(x, Term())) == And((Le(x, Term()), Not(Le(Term(), x))))


def test_nnf_pushes_negation_to_atoms():
    f = nnf(parse("!(ALL x. x <~ y & !(EX z. z = x))"))
    text = to_text(f)
    assert text.startswith("EX x.")

    def negations_on_atoms(g):
        if isinstance(g, Not):
            return isinstance(g.arg, (Le, IsZero))
        for a in getattr(g, "args", ()):
            if not negations_on_atoms(a):
                return False
        body = getattr(g, "body", None)
        return body is None or negations_on_atoms(body)

    assert negations_on_atoms(f)
