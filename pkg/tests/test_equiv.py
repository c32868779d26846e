import pytest

from qoag.builders import example_b, finite_table, five_z, notproduct_g2, q_order, q_tensor_z4, trivial_valuation, z_order
from qoag.core import quotient_qo
from qoag.groups import Product, Window, make_spec
from qoag.logic.equiv import (
    SHIPPED_SENTENCES,
    TORSION_SENTENCE,
    Decider,
    decide,
    equiv_rank_k,
    exact_product,
    sentence_corpus,
)
from qoag.logic.evaluate import Truth3
from qoag.logic.formula import free_vars, quantifier_rank
from qoag.logic.parser import parse


def test_corpus_is_sentences_of_bounded_rank():
    corpus = sentence_corpus(2)
    assert len(corpus) == len(set(corpus))
    for f in corpus:
        assert not free_vars(f)
    extra = [f for f in corpus if str(f) not in {str(parse(s)) for s in SHIPPED_SENTENCES}]
    assert max(quantifier_rank(f) for f in extra) == 2


def test_identical_finite_groups_are_indistinguishable():
    rep = equiv_rank_k(trivial_valuation((5,)), trivial_valuation((5,)), 2)
    assert rep.verdict == "indistinguishable at rank 2"
    assert not rep.unknowns and rep.modes == ("finite", "finite")


def test_notproduct_pair_distinguished_by_torsion():
    rep = equiv_rank_k(example_b(), notproduct_g2(), 2, w=Window(6))
    assert rep.verdict == "distinguished"
    sentences = [s for s, _, _ in rep.distinguishing]
    assert str(parse(TORSION_SENTENCE)) in sentences


def test_relabeled_h_is_indistinguishable():
    # Z/4 with its 2-adic valuation written as a rank table, through g -> 3g
    ranks = {(0,): 0, (2,): 1, (1,): 2, (3,): 2}
    relabeled = finite_table((4,), {(3 * g % 4,): r for (g,), r in ranks.items()}, name="Z/4 relabeled")
    G1 = q_tensor_z4()
    G2 = make_spec(Product(q_order(), relabeled, (0,)), name="Q * relabeled")
    rep = equiv_rank_k(G1, G2, 2)
    assert rep.modes == ("product", "product")
    assert rep.verdict == "indistinguishable at rank 2"
    assert not rep.unknowns


def test_q_tensor_z4_against_klein_valued_part():
    G2 = make_spec(Product(q_order(), trivial_valuation((2, 2)), (0,)), name="Q * (Z/2)^2")
    rep = equiv_rank_k(q_tensor_z4(), G2, 1)
    assert rep.verdict == "distinguished" and not rep.unknowns


def test_report_json_shape():
    rep = equiv_rank_k(example_b(), notproduct_g2(), 1, w=Window(6))
    doc = rep.to_json()
    assert {"verdict", "witnesses", "unknowns", "pair_count"} <= set(doc)
    assert doc["witnesses"][0]["G1"] in ("True", "False")


@pytest.mark.parametrize(
    "sentence, expected",
    [
        ("ALL x. ALL y. x << y -> EX z. x << z & z << y", Truth3.FALSE),
        ("EX x. 0 << x & ALL y. 0 << y -> x <~ y", Truth3.FALSE),
        ("EX x. 2*x = 0 & x != 0", Truth3.TRUE),
        ("EX x. 3*x = 0 & x != 0", Truth3.FALSE),
        ("ALL x. 0 <~ x", Truth3.FALSE),
        ("EX x. x != 0 & x ~ -x", Truth3.TRUE),
        ("ALL y. EX x. 2*x = y", Truth3.FALSE),
        ("ALL y. EX x. 3*x = y", Truth3.TRUE),
    ],
)
def test_decider_on_q_tensor_z4(sentence, expected):
    G = q_tensor_z4()
    assert exact_product(G)
    assert decide(G, parse(sentence)) is expected


def test_decider_uses_specialization_past_the_cap(monkeypatch):
    monkeypatch.setenv("QOAG_PAIR_CAP", "4")
    G = q_tensor_z4()
    f = parse("ALL x. ALL y. x << y -> EX z. x << z & z << y")
    assert decide(G, f) is Truth3.FALSE
    assert decide(G, parse("ALL y. EX x. 3*x = y")) is Truth3.TRUE


def test_decider_rejects_free_variables():
    with pytest.raises(ValueError):
        Decider(q_tensor_z4()).decide(parse("x = 0"))


def test_parts_of_the_notproduct_pair_agree():
    o = equiv_rank_k(z_order(), five_z(), 2, w=Window(6))
    assert o.verdict == "indistinguishable at rank 2" and not o.unknowns
    H = quotient_qo(example_b(), (5,), Window(12))
    v = equiv_rank_k(H, trivial_valuation((5,)), 2)
    assert v.verdict == "indistinguishable at rank 2" and not v.unknowns
