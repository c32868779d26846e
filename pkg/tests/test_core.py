import itertools
import json

import pytest

from qoag import core
from qoag.builders import (
    example_a,
    example_b,
    finite_table,
    lex_z,
    padic,
    preqo_nontransitive,
    remark_counterexample,
    trivial_valuation,
    z2_degenerate,
    z_order,
)
from qoag.errors import CoordinateMismatch, QuotientConditionViolated, SpecError, StructureViolation, UnsupportedSpec
from qoag.groups import INF, Classification, CompareResult, Window, from_json, zigzag


def test_compare_example_a():
    G = example_a()
    assert core.compare(G, (0, 1), (0, 2)) is CompareResult.STRICT_BELOW
    assert core.compare(G, (1, 7), (-3, 0)) is CompareResult.EQUIVALENT
    assert core.compare(G, (2, 5), (2, 5)) is CompareResult.EQUIVALENT


def test_compare_rejects_wrong_dimension():
    with pytest.raises(CoordinateMismatch):
        core.compare(example_a(), (1,), (0, 1))


def test_classify_example_a():
    G = example_a()
    assert core.classify(G, (0, 3)) is Classification.OTYPE
    assert core.classify(G, (1, 5)) is Classification.VTYPE
    assert core.classify(G, (0, 0)) is Classification.ZERO


@pytest.mark.parametrize("G", [example_a(), example_b(), padic(2, 3), remark_counterexample(), z2_degenerate()])
def test_compare_is_total_and_transitive(G):
    D = core.domain(G, Window(3))
    for g, h in itertools.product(D, repeat=2):
        r = G.compare(g, h)
        assert (r is CompareResult.STRICT_BELOW) == (G.le(g, h) and not G.le(h, g))
        assert G.le(g, h) or G.le(h, g)
    for g, h, f in itertools.product(D[:12], repeat=3):
        if G.le(g, h) and G.le(h, f):
            assert G.le(g, f)


@pytest.mark.parametrize("G", [example_a(), example_b(), padic(2, 2), z_order()])
def test_vtype_characterizations_agree(G):
    for g in core.domain(G, Window(4)):
        if not any(g):
            continue
        v = G.classify(g) is Classification.VTYPE
        assert v == (G.le(G.zero, g) and G.le(G.zero, G.neg(g))) == G.equiv(g, G.neg(g))


def test_q2_remark_witness():
    rep = core.check_q2(remark_counterexample(), Window(3))
    assert rep.axiom == "Q2"
    assert rep.witness == ((0, 0), (1, 0), (1, 1))
    assert rep.reproduces()


@pytest.mark.parametrize("G", [example_a(), z_order()])
def test_q1_q2_pass_at_n10(G):
    assert core.check_q1(G, Window(10)) is None
    assert core.check_q2(G, Window(10)) is None


def test_verdict_labels():
    assert core.verdict_label(z_order(), Window(5)) == "window-verified up to N=5"
    assert core.verdict_label(padic(2, 2), None) == "proved (exhaustive)"


def test_vm_examples():
    assert core.check_vm(padic(2, 3), 3) is None
    assert core.check_vm(z_order(), 2, Window(10)) is None
    rep = core.check_vm(padic(2, 2), 2)
    assert rep.witness == ((1,),)
    assert rep.reproduces()


def test_o_part_examples():
    w = Window(6)
    assert set(core.o_part(example_a(), w).elements) == {(0, b) for b in zigzag(6)}
    op = core.o_part(example_b(), Window(12))
    assert set(op.elements) == {(k,) for k in range(-10, 11, 5)}
    assert op.subgroup == (5,)
    assert core.o_part(padic(2, 2)).elements == ((0,),)


def test_o_part_rejects_remark_counterexample():
    with pytest.raises(StructureViolation):
        core.o_part(remark_counterexample(), Window(3))


def test_extract_valuation_examples():
    v = core.extract_valuation(example_b(), Window(10))
    assert v.gamma0 == 1
    assert v((5,)) == 1 and v((3,)) == 0 and v((0,)) == INF
    v = core.extract_valuation(z2_degenerate())
    assert v((1,)) == 0 and v.gamma0 == 0 + 1
    v = core.extract_valuation(z_order(), Window(5))
    assert {v(g) for g in z_order().elements(Window(5)) if any(g)} == {v.gamma0}


def test_is_convex_examples():
    assert not core.is_convex(z_order(), (2,), Window(5))
    rep = core.is_convex(example_a(), (0, 1), Window(5))
    assert rep and rep.contains_o_part
    assert core.is_convex(example_b(), (5,), Window(12))


def test_quotient_examples():
    Q = core.quotient_qo(example_b(), (5,), Window(12))
    assert Q.is_finite and Q.order == 5
    assert all(Q.classify(g) is Classification.VTYPE for g in Q.elements() if any(g))
    assert len({Q.key(g) for g in Q.elements() if any(g)}) == 1
    assert core.check_q1(Q) is None and core.check_q2(Q) is None
    G = padic(2, 3)
    same = core.quotient_qo(G, (8,))
    assert all(same.le(a, b) == G.le(a, b) for a in G.elements() for b in G.elements())


def test_quotient_condition_violation():
    # Z/4Z ordered 0 < 1 < 2 < 3 is not compatible; the quotient by 2Z/4Z fails
    G = finite_table((4,), {(0,): 0, (1,): 1, (2,): 2, (3,): 3})
    with pytest.raises(QuotientConditionViolated):
        core.quotient_qo(G, (2,))


def test_archimedean_coarsening_of_z_is_trivial():
    A = core.archimedean_coarsening(z_order(), Window(6))
    assert A.class_count == 2
    assert {A.vstar[g] for g in A.elements if any(g)} == {0}


def test_archimedean_coarsening_nontransitive_example():
    G = preqo_nontransitive(2)
    A = core.archimedean_coarsening(G, Window(4))
    f, g, h = (0, 2), (1, 2), (0, 1)
    assert A.le_pre(g, h) and A.le_pre(h, f) and not A.le_pre(g, f)
    assert A.le_star(g, f)
    assert core.arch_valuation_violations(A) == []


def test_archimedean_coarsening_of_lex_z2_has_two_values():
    A = core.archimedean_coarsening(lex_z(2), Window(8))
    assert A.skeleton_values() == [0, 1]
    assert A.vstar[(0, 3)] == A.vstar[(0, -1)] != A.vstar[(1, 0)]


def test_archimedean_coarsening_is_a_coarsening():
    G = example_a()
    A = core.archimedean_coarsening(G, Window(4))
    z = G.zero
    for g, h in itertools.product(A.elements, repeat=2):
        if G.le(z, g) and G.le(g, h):
            assert A.le_star(g, h)
    for g in A.elements:
        for n in range(1, 5):
            ng = G.scale(n, g)
            if ng in A._index:
                assert A.rank[ng] == A.rank[g]


def test_archimedean_coarsening_rejects_torsion():
    with pytest.raises(UnsupportedSpec):
        core.archimedean_coarsening(remark_counterexample(), Window(3))


def test_spec_loader_rejects_unknown_fields():
    with pytest.raises(SpecError):
        from_json({"free_rank": 1, "qo": {"kind": "lex"}, "colour": "red"})
    with pytest.raises(SpecError):
        from_json({"free_rank": 1, "qo": {"kind": "lex", "speed": 1}})


def test_spec_loader_rejects_non_ultrametric_valuation():
    doc = {"free_rank": 0, "torsion_orders": [4], "qo": {"kind": "valuation", "chain": 2, "values": [[[1], 1], [[2], 0], [[3], 1]]}}
    with pytest.raises(SpecError):
        from_json(doc)


def test_trivial_valuation_has_zero_minimum():
    G = trivial_valuation((5,))
    assert all(G.le(G.zero, g) for g in G.elements())
    assert json.loads(json.dumps(G.to_json()))["qo"]["kind"] == "valuation"


def test_degenerate_z2_is_allowed():
    G = z2_degenerate()
    assert G.lt((0,), (1,))
    assert G.classify((1,)) is Classification.VTYPE
