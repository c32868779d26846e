import random

import pytest

from qoag.builders import example_a, example_b, padic, trivial_valuation, z_order
from qoag.errors import UnboundVariable
from qoag.groups import Window
from qoag.logic.evaluate import Evaluator, Truth3, counterexample, evaluate, witness
from qoag.logic.generate import random_formula
from qoag.logic.parser import parse


def test_trivial_valuation_has_minimum_zero():
    assert evaluate(trivial_valuation((5,)), parse("ALL x1. 0 <~ x1")) is Truth3.TRUE


def test_valuational_sentence_fails_on_z():
    f = parse("ALL x1. 0 <~ x1")
    assert evaluate(z_order(), f, w=Window(3)) is Truth3.FALSE
    assert counterexample(z_order(), f, w=Window(3)) == (-1,)


def test_example_a_equivalent_to_parameter():
    G = example_a()
    f = parse("EX x1. x1 ~ c1 & !(x1 = c1)")
    assert evaluate(G, f, {"c1": (1, 0)}, Window(3)) is Truth3.TRUE
    g = witness(G, f, {"c1": (1, 0)}, Window(3))
    assert g is not None and G.equiv(g, (1, 0)) and g != (1, 0)


def test_example_a_witness_two_zero_is_valid():
    G = example_a()
    f = parse("x1 ~ c1 & !(x1 = c1)")
    assert evaluate(G, f, {"c1": (1, 0), "x1": (2, 0)}) is Truth3.TRUE


def test_halving_one_in_z_is_unknown():
    f = parse("EX x1. x1 + x1 = c1")
    assert evaluate(z_order(), f, {"c1": (1,)}, Window(10)) is Truth3.UNKNOWN


def test_halving_with_equation_solving():
    f = parse("EX x1. x1 + x1 = c1")
    assert evaluate(z_order(), f, {"c1": (1,)}, Window(10), solve_equations=True) is Truth3.FALSE
    assert evaluate(z_order(), f, {"c1": (4,)}, Window(1), solve_equations=True) is Truth3.TRUE


def test_quantifier_free_is_exact_outside_window():
    f = parse("c1 << c2")
    assert evaluate(z_order(), f, {"c1": (100,), "c2": (1000,)}, Window(1)) is Truth3.TRUE


def test_unbound_variable():
    with pytest.raises(UnboundVariable):
        evaluate(z_order(), parse("x1 <~ c1"), {"x1": (0,)})


def test_finite_groups_never_unknown():
    G = padic(2, 3)
    ev = Evaluator(G)
    rng = random.Random(3)
    for _ in range(100):
        f = random_formula(rng, [], rank=2)
        assert ev.truth(f).definite


def test_torsion_sentences():
    f = parse("EX x. 5*x = 0 & x != 0")
    assert evaluate(trivial_valuation((5,)), f) is Truth3.TRUE
    assert evaluate(example_b(), f, w=Window(6), solve_equations=True) is Truth3.FALSE


@pytest.mark.parametrize("G", [z_order(), example_a(), example_b()])
def test_monotone_in_window(G):
    rng = random.Random(11)
    for _ in range(40):
        f = random_formula(rng, ["x1"], rank=2)
        small, large = Evaluator(G, Window(2)), Evaluator(G, Window(4))
        for g in G.elements(Window(1)):
            a = small.truth(f, {"x1": g})
            b = large.truth(f, {"x1": g})
            assert a is Truth3.UNKNOWN or a is b, (f, g, a, b)
