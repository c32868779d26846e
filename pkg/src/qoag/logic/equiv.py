"""Rank-bounded comparison of two groups on a corpus of sentences.

Full elementary equivalence is not decidable in general, so two groups
are compared on every sentence of a bounded corpus.  Verdicts come from
the most exact procedure available for each group: finite groups are
evaluated exhaustively, o * H products with a divisible ordered part and a
finite valued part are decided through fv_decompose and qe_doag (past the
pair cap, by fixing H-components and eliminating over o), and all other
groups fall back to windowed evaluation (with equation solving).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..groups import GroupSpec, Product, Window
from .evaluate import Evaluator, Truth3
from .formula import (
    And,
    Const,
    Exists,
    ForAll,
    Formula,
    IsZero,
    Le,
    Not,
    Or,
    Term,
    free_vars,
    nnf,
)
from .parser import parse
from .hybrid import specialize
from .qe import qe_doag
from .translate import fv_decompose, pair_cap, pair_count

# Sentences always added to a corpus: torsion, valuational-likeness,
# existence of v-type elements, density and discreteness probes.
SHIPPED_SENTENCES = (
    "EX x. 2*x = 0 & x != 0",
    "EX x. 3*x = 0 & x != 0",
    "EX x. 5*x = 0 & x != 0",
    "ALL x. 0 <~ x",
    "EX x. x != 0 & x ~ -x",
    "EX x. x != 0 & !(x ~ -x)",
    "EX x. 2*x != 0 & 2*x ~ -2*x",
    "ALL x. ALL y. x << y -> EX z. x << z & z << y",
    "EX x. 0 << x & ALL y. 0 << y -> x <~ y",
)

TORSION_SENTENCE = "EX x. 5*x = 0 & x != 0"


def _vectors(r: int):
    return [v for v in itertools.product((-1, 0, 1), repeat=r)]


def sentence_corpus(k: int, extra=()) -> list:
    """Prenex sentences with 1..k quantifiers over y1..yr whose matrix is a
    single literal mentioning every bound variable.  Terms use
    coefficients -1, 0, 1; equations also use single-variable multiples
    2..5.  Shipped and extra sentences are appended."""
    out = []
    for r in range(1, k + 1):
        names = [f"y{i}" for i in range(1, r + 1)]
        terms = [Term.of(dict(zip(names, v))) for v in _vectors(r)]
        atoms = []
        for a, b in itertools.product(terms, repeat=2):
            if a != b and (a.names() | b.names()) == set(names):
                atoms.append(Le(a, b))
        eq_terms = [t for t in terms if t.names() == set(names) and t.coeffs[0][1] > 0]
        if r == 1:
            eq_terms += [Term.var("y1", m) for m in range(2, 6)]
        atoms += [IsZero(t) for t in eq_terms]
        for atom in atoms:
            for lit in (atom, Not(atom)):
                for qs in itertools.product((Exists, ForAll), repeat=r):
                    f = lit
                    for q, n in zip(reversed(qs), reversed(names)):
                        f = q(n, f)
                    out.append(f)
    for s in list(SHIPPED_SENTENCES) + list(extra):
        f = parse(s) if isinstance(s, str) else s
        if f not in out:
            out.append(f)
    return out


# ---------------------------------------------------------------------------
# deciding sentences


def exact_product(G: GroupSpec) -> bool:
    """o * H with divisible ordered part and finite valued part."""
    return isinstance(G.qo, Product) and G.qo.o.divisible and G.qo.o.dim == 1 and G.qo.v.is_finite


class Decider:
    """Decides sentences in one group with the most exact method available."""

    def __init__(self, G: GroupSpec, w: Window | None = None):
        self.G = G
        self.w = w or Window(4)
        self.mode = "finite" if G.is_finite else "product" if exact_product(G) else "window"
        if self.mode == "product":
            self.o, self.H = G.qo.o, G.qo.v
            self.h_eval = Evaluator(self.H)
            self._qe_cache = {}
        else:
            self.ev = Evaluator(G, self.w, solve_equations=True)

    def decide(self, f: Formula) -> Truth3:
        if free_vars(f):
            raise ValueError("decide expects a sentence")
        if self.mode != "product":
            return self.ev.truth(f)
        return Truth3.of(self._product(f))

    def _product(self, f):
        if isinstance(f, Const):
            return f.value
        if isinstance(f, Not):
            r = self._product(f.arg)
            return None if r is None else not r
        if isinstance(f, ForAll):
            r = self._product(Exists(f.var, Not(f.body)))
            return None if r is None else not r
        if isinstance(f, (And, Or)):
            rs = [self._product(a) for a in f.args]
            want = isinstance(f, Or)
            if want in rs:
                return want
            return None if None in rs else not want
        if pair_count(nnf(f)) > pair_cap():
            return self._o_truth(specialize(self.G, f, {}))
        for o_side, v_side in fv_decompose(nnf(f)):
            if self.h_eval.value(v_side) is not True:
                continue
            if self._o_truth(o_side):
                return True
        return False

    def _o_truth(self, f: Formula) -> bool:
        r = self._qe_cache.get(f)
        if r is None:
            g = qe_doag(f)
            if not isinstance(g, Const):
                raise AssertionError(f"qe left a non-constant sentence: {g}")
            r = self._qe_cache[f] = g.value
        return r


def decide(G: GroupSpec, f: Formula, w: Window | None = None) -> Truth3:
    return Decider(G, w).decide(f)


@dataclass
class EquivReport:
    k: int
    checked: int
    distinguishing: list = field(default_factory=list)
    unknowns: list = field(default_factory=list)
    modes: tuple = ()
    pair_count: int | float = 0

    @property
    def verdict(self) -> str:
        if self.distinguishing:
            return "distinguished"
        return f"indistinguishable at rank {self.k}"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "rank": self.k,
            "checked": self.checked,
            "modes": list(self.modes),
            "witnesses": [{"sentence": s, "G1": a, "G2": b} for s, a, b in self.distinguishing],
            "unknowns": [{"sentence": s, "G1": a, "G2": b} for s, a, b in self.unknowns],
            "pair_count": "inf" if self.pair_count == float("inf") else self.pair_count,
        }


def equiv_rank_k(G1: GroupSpec, G2: GroupSpec, k: int, sentences=None, w: Window | None = None, extra=()) -> EquivReport:
    """Compare G1 and G2 on the rank-k corpus (or on the given sentences)."""
    corpus = sentence_corpus(k, extra) if sentences is None else [parse(s) if isinstance(s, str) else s for s in sentences]
    d1, d2 = Decider(G1, w), Decider(G2, w)
    rep = EquivReport(k, len(corpus), modes=(d1.mode, d2.mode))
    if "product" in rep.modes:
        rep.pair_count = max(pair_count(nnf(f)) for f in corpus)
    for f in corpus:
        a, b = d1.decide(f), d2.decide(f)
        if a.definite and b.definite:
            if a is not b:
                rep.distinguishing.append((str(f), a.value, b.value))
        elif a is not b:
            rep.unknowns.append((str(f), a.value, b.value))
    return rep
