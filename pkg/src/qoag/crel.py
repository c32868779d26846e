"""C-relations induced by compatible quasi-orders, balls and swiss cheeses.

The induced relation is
    C(x,y,z) iff (x != y = z)
              or (x-z in Gv and y-z < x-z)
              or (y-z, x-z in Go and 0 < x-y and 0 < x-z)
where Gv is the set of v-type elements and Go the o-type elements with 0.
"""
from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .core import ViolationReport, _r
from .errors import NoMinimum, NotRepresentable
from .groups import Classification, GroupSpec, Product, Window, render_element
from .logic.evaluate import Evaluator, Truth3
from .logic.formula import (
    And,
    Formula,
    Le,
    Lt,
    Not,
    Or,
    Term,
    ZERO,
    free_vars,
    nnf,
    sorted_names,
)
from .logic.hybrid import specialize
from .logic.qe import EQ, LE, LT, NE, constraints_of
from .logic.translate import fv_decompose, pair_count

DEFAULT_QUINTUPLE_BUDGET = 20000


# ---------------------------------------------------------------------------
# relations


class CRelation:
    """A ternary relation on the elements of a group."""

    def __init__(self, G: GroupSpec, pred: Callable, name: str = ""):
        self.G = G
        self.pred = pred
        self.name = name

    def __call__(self, x, y, z) -> bool:
        return bool(self.pred(x, y, z))

    def table(self, D: list) -> np.ndarray:
        n = len(D)
        T = np.zeros((n, n, n), dtype=bool)
        for i, j, k in itertools.product(range(n), repeat=3):
            T[i, j, k] = self(D[i], D[j], D[k])
        return T


class CRelationView(CRelation):
    """The C-relation induced by the quasi-order of G."""

    def __init__(self, G: GroupSpec):
        super().__init__(G, None, name=f"C({G.name or 'G'})")

    def __call__(self, x, y, z) -> bool:
        G = self.G
        if x != y and y == z:
            return True
        xz, yz = G.sub(x, z), G.sub(y, z)
        cxz = G.classify(xz)
        if cxz is Classification.VTYPE and G.lt(yz, xz):
            return True
        if cxz is not Classification.VTYPE and G.is_o(yz):
            zero = G.zero
            return G.lt(zero, G.sub(x, y)) and G.lt(zero, xz)
        return False

    def table(self, D: list) -> np.ndarray:
        G = self.G
        n = len(D)
        diffs = [[G.sub(a, b) for b in D] for a in D]
        keys = {}
        for row in diffs:
            for d in row:
                if d not in keys:
                    keys[d] = G.key(d)
        zero = G.zero
        keys.setdefault(zero, G.key(zero))
        order = {k: i for i, k in enumerate(sorted(set(keys.values())))}
        R = np.array([[order[keys[d]] for d in row] for row in diffs])
        iso = np.array([[G.is_o(d) for d in row] for row in diffs])
        isv = ~iso
        r0 = order[keys[zero]]
        eq = np.eye(n, dtype=bool)
        t1 = (~eq)[:, :, None] & eq[None, :, :]
        t2 = isv[:, None, :] & (R[None, :, :] < R[:, None, :])
        t3 = iso[None, :, :] & iso[:, None, :] & (R > r0)[:, :, None] & (R > r0)[:, None, :]
        return t1 | t2 | t3


def induce_c(G: GroupSpec) -> CRelationView:
    return CRelationView(G)


def _domain(G: GroupSpec, w: Window | None) -> list:
    return G.elements(None if G.is_finite else (w or Window(3)))


def check_c_axioms(
    cv: CRelation,
    w: Window | None = None,
    budget: int = DEFAULT_QUINTUPLE_BUDGET,
    seed: int = 0,
) -> ViolationReport | None:
    """First violation of (C1)-(C4) or compatibility with +, or None.

    Triples range over the window.  Compatibility is checked exhaustively
    in its single-translate form (enough for abelian groups); the two-sided
    quintuple form is checked exhaustively when it fits the budget and
    sampled otherwise."""
    G = cv.G
    D = _domain(G, w)
    T = cv.table(D)
    n = len(D)

    def report(axiom, idx, text, replay):
        wit = tuple(D[i] for i in idx)
        return ViolationReport(axiom, wit, text.format(*[_r(g) for g in wit]), G, replay)

    bad = np.argwhere(T & ~T.transpose(0, 2, 1))
    if len(bad):
        x, y, z = map(int, bad[0])
        X, Y, Z = D[x], D[y], D[z]
        return report("C1", (x, y, z), "C({0},{1},{2}) holds but C({0},{2},{1}) fails", lambda: cv(X, Y, Z) and not cv(X, Z, Y))
    bad = np.argwhere(T & T.transpose(1, 0, 2))
    if len(bad):
        x, y, z = map(int, bad[0])
        X, Y, Z = D[x], D[y], D[z]
        return report("C2", (x, y, z), "C({0},{1},{2}) and C({1},{0},{2}) both hold", lambda: cv(X, Y, Z) and cv(Y, X, Z))
    for z in range(n):
        A = T[:, :, z]
        nA = (~A).astype(np.int64)
        P = nA @ nA
        hits = np.argwhere(A & (P > 0))
        if len(hits):
            x, y = map(int, hits[0])
            wi = int(np.argwhere(~A[x, :] & ~A[:, y])[0][0])
            X, Y, Z, W = D[x], D[y], D[z], D[wi]
            return report(
                "C3",
                (x, y, z, wi),
                "C({0},{1},{2}) holds but neither C({3},{1},{2}) nor C({0},{3},{2})",
                lambda: cv(X, Y, Z) and not cv(W, Y, Z) and not cv(X, W, Z),
            )
    diag = T[np.arange(n), :, :][:, np.arange(n), np.arange(n)]  # diag[x, y] = T[x, y, y]
    bad = np.argwhere(~diag & ~np.eye(n, dtype=bool))
    if len(bad):
        x, y = map(int, bad[0])
        X, Y = D[x], D[y]
        return report("C4", (x, y, y), "{0} != {1} but C({0},{1},{1}) fails", lambda: not cv(X, Y, Y))
    index = {g: i for i, g in enumerate(D)}
    for t in D:
        p = np.array([index.get(G.add(g, t), -1) for g in D])
        ok = p >= 0
        src = np.nonzero(ok)[0]
        dst = p[ok]
        A = T[np.ix_(src, src, src)]
        B = T[np.ix_(dst, dst, dst)]
        bad = np.argwhere(A & ~B)
        if len(bad):
            x, y, z = (int(src[i]) for i in bad[0])
            X, Y, Z, Tt = D[x], D[y], D[z], t
            rep = report(
                "compatibility",
                (x, y, z, index[t]),
                "C({0},{1},{2}) holds but not after translating by {3}",
                lambda: cv(X, Y, Z) and not cv(G.add(X, Tt), G.add(Y, Tt), G.add(Z, Tt)),
            )
            return rep
    return _quintuples(cv, D, budget, seed)


def _quintuples(cv: CRelation, D: list, budget: int, seed: int):
    G = cv.G
    n = len(D)
    if n**5 <= budget:
        it = itertools.product(D, repeat=5)
    else:
        rng = random.Random(seed)
        it = (tuple(rng.choice(D) for _ in range(5)) for _ in range(budget))
    for x, y, z, u, v in it:
        if cv(x, y, z):
            s = lambda g: G.add(G.add(v, g), u)  # noqa: E731
            if not cv(s(x), s(y), s(z)):
                wit = (x, y, z, u, v)
                return ViolationReport(
                    "compatibility",
                    wit,
                    "C({0},{1},{2}) holds but fails after v+_+u with u={3}, v={4}".format(*[_r(g) for g in wit]),
                    G,
                    lambda: cv(x, y, z) and not cv(s(x), s(y), s(z)),
                )
    return None


# ---------------------------------------------------------------------------
# recovering the quasi-order


class RecoveredOrder:
    """x <~ y iff not phi(y, x), with phi built from C alone."""

    def __init__(self, cv: CRelation):
        self.cv = cv
        self.G = cv.G

    def negative(self, x) -> bool:
        return self.cv(self.G.neg(x), x, self.G.zero)

    def lt(self, x, y) -> bool:
        """phi(x, y)"""
        G, C, zero = self.G, self.cv, self.G.zero
        nx, ny = self.negative(x), self.negative(y)
        if nx and not ny:
            return True
        if not nx and not ny:
            return C(y, x, zero)
        if nx and ny:
            return C(G.neg(x), G.neg(y), zero)
        return False

    def le(self, x, y) -> bool:
        return not self.lt(y, x)


def recover_qo(cv: CRelation) -> RecoveredOrder:
    return RecoveredOrder(cv)


def recovery_mismatches(cv: CRelationView, w: Window | None = None) -> list:
    """Window pairs where the recovered relation differs from the original."""
    G = cv.G
    rec = recover_qo(cv)
    D = _domain(G, w)
    return [(x, y) for x in D for y in D if rec.le(x, y) != G.le(x, y)]


def recovery_report(cv: CRelation, w: Window | None = None) -> dict:
    """How the recovered relation behaves: totality, transitivity, and
    whether re-inducing C from it gives back cv on the window."""
    G = cv.G
    rec = recover_qo(cv)
    D = _domain(G, w)
    n = len(D)
    L = np.array([[rec.le(x, y) for y in D] for x in D])
    non_total = np.argwhere(~L & ~L.T)
    Li = L.astype(np.int64)
    non_trans = np.argwhere(((Li @ Li) > 0) & ~L)
    out = {"total": not len(non_total), "transitive": not len(non_trans), "reproduces_c": None}
    if len(non_total):
        out["non_total_pair"] = [render_element(D[i]) for i in non_total[0]]
    if len(non_trans):
        x, z = map(int, non_trans[0])
        y = int(np.argwhere(L[x, :] & L[:, z])[0][0])
        out["non_transitive_triple"] = [render_element(D[i]) for i in (x, y, z)]
    if out["total"] and out["transitive"]:
        ranks = {}
        for i in range(n):
            ranks[D[i]] = int(L[:, i].sum())
        mismatch = None
        for i, j, k in itertools.product(range(n), repeat=3):
            if _induced_from_le(G, rec, D[i], D[j], D[k]) != cv(D[i], D[j], D[k]):
                mismatch = [render_element(D[t]) for t in (i, j, k)]
                break
        out["reproduces_c"] = mismatch is None
        if mismatch:
            out["c_mismatch"] = mismatch
    return out


def _induced_from_le(G, rec: RecoveredOrder, x, y, z) -> bool:
    def lt(a, b):
        return rec.le(a, b) and not rec.le(b, a)

    def is_v(a):
        return any(a) and rec.le(a, G.neg(a)) and rec.le(G.neg(a), a)

    if x != y and y == z:
        return True
    xz, yz = G.sub(x, z), G.sub(y, z)
    if is_v(xz) and lt(yz, xz):
        return True
    zero = G.zero
    return not is_v(xz) and not is_v(yz) and lt(zero, G.sub(x, y)) and lt(zero, xz)


def z2_lex_c_relation() -> CRelation:
    """A compatible C-relation on Z^2 that no compatible q.o induces:
    C(x,y,z) iff (x1 != y1 = z1) or (y1 < x1 and z1 < x1) or (x != y = z)."""
    from .builders import lex_z

    G = lex_z(2, name="Z^2 C-relation")

    def pred(x, y, z):
        return (x[0] != y[0] == z[0]) or (y[0] < x[0] and z[0] < x[0]) or (x != y and y == z)

    return CRelation(G, pred, name="non-induced Z^2")


# ---------------------------------------------------------------------------
# balls and swiss cheeses


@dataclass(frozen=True)
class Ball:
    kind: str  # "open" or "closed"
    center: tuple
    radius: tuple

    def contains(self, G: GroupSpec, g) -> bool:
        d = G.sub(g, self.center)
        return G.lt(d, self.radius) if self.kind == "open" else G.le(d, self.radius)

    def to_json(self) -> dict:
        return {"kind": self.kind, "center": render_element(self.center), "radius": render_element(self.radius)}

    def __str__(self):
        rel = "<<" if self.kind == "open" else "<~"
        return f"{{g : g - {render_element(self.center)} {rel} {render_element(self.radius)}}}"


@dataclass(frozen=True)
class SwissCheese:
    outer: Ball
    holes: tuple = ()

    def contains(self, G: GroupSpec, g) -> bool:
        return self.outer.contains(G, g) and not any(h.contains(G, g) for h in self.holes)

    def to_json(self) -> dict:
        return {"outer": self.outer.to_json(), "holes": [h.to_json() for h in self.holes]}

    def __str__(self):
        if not self.holes:
            return str(self.outer)
        return str(self.outer) + " minus " + ", ".join(str(h) for h in self.holes)


def ball_members(G: GroupSpec, b: Ball, w: Window | None = None) -> set:
    return {g for g in _domain(G, w) if b.contains(G, g)}


def cheese_members(G: GroupSpec, c: SwissCheese, w: Window | None = None) -> set:
    return {g for g in _domain(G, w) if c.contains(G, g)}


def cone(cv: CRelation, a, b, w: Window | None = None) -> set:
    """{x : C(a, x, b)}"""
    return {x for x in _domain(cv.G, w) if cv(a, x, b)}


def thick_cone(cv: CRelation, a, b, w: Window | None = None) -> set:
    """{x : not C(x, a, b)}"""
    return {x for x in _domain(cv.G, w) if not cv(x, a, b)}


def cone_as_cheese(G: GroupSpec, a, b) -> SwissCheese:
    """The cone {x : C(a,x,b)} of the induced relation as a swiss cheese:
    the open ball around b of radius a - b when 0 < a - b, a singleton
    when a - b is negative o-type, and empty when a = b."""
    d = G.sub(a, b)
    zero = G.zero
    if G.lt(zero, d):
        return SwissCheese(Ball("open", b, d))
    if a == b:
        return SwissCheese(Ball("closed", b, zero), (Ball("closed", b, zero),))
    return SwissCheese(Ball("closed", b, zero), (Ball("open", b, zero),))


def thick_cone_as_cheese(G: GroupSpec, a, b) -> SwissCheese:
    """{x : not C(x,a,b)}: the closed ball around b of radius a - b when
    a - b is v-type, of radius max(a - b, 0) when it is o-type, and the
    singleton {a} when a = b."""
    zero = G.zero
    if a == b:
        return SwissCheese(Ball("closed", a, zero), (Ball("open", a, zero),))
    d = G.sub(a, b)
    if G.classify(d) is Classification.VTYPE or G.lt(zero, d):
        return SwissCheese(Ball("closed", b, d))
    return SwissCheese(Ball("closed", b, zero))


def ball_as_cone(G: GroupSpec, ball: Ball, w: Window | None = None):
    """Parameters (a, b) with ball = cone(a, b) (open balls) or
    thick_cone(a, b) (closed balls), or None when the window offers no
    suitable parameters."""
    zero = G.zero
    c, r = ball.center, ball.radius
    if G.lt(zero, r):
        return G.add(c, r), c
    # radius <~ 0: the ball is a ray inside the o-coset of c
    shift = c if not any(r) else G.add(c, r)
    if ball.kind == "closed" and not any(r) and not _positive_o(G, w):
        return c, c
    if ball.kind == "open" and not any(r) and not _positive_o(G, w):
        return c, c
    s = _positive_o(G, w)
    if s is None:
        return None
    if ball.kind == "open":
        return shift, G.sub(shift, s)
    return G.sub(shift, s), shift


def _positive_o(G: GroupSpec, w: Window | None):
    for g in _domain(G, w):
        if any(g) and G.is_o(g) and G.lt(G.zero, g):
            return g
    return None


# ---------------------------------------------------------------------------
# lifting ball formulas from the valued part


def min_nonzero(H: GroupSpec):
    """An element of the least class of H minus 0."""
    if not H.is_finite:
        raise NoMinimum(f"{H.name or 'H'} is infinite; no minimum of H minus 0 is available")
    rest = [h for h in H.elements() if any(h)]
    if not rest:
        raise NoMinimum("H is trivial")
    return min(rest, key=H.key)


def lift_ball_formula(G: GroupSpec, f: Formula, params: dict, var: str = "x", m_name: str = "m"):
    """Rewrite a boolean combination of balls over the valued part of
    G = o * H into one over G.

    Ball atoms have the form  var - a <~ b  or  var - a << b  where a and b
    are parameter names (or absent).  Returns (formula, params over G)."""
    if not isinstance(G.qo, Product):
        raise ValueError("lift_ball_formula expects a product o * H")
    P = G.qo
    H = P.v
    m = min_nonzero(H)
    lifted = {name: P.join(P.o.zero, H.element(h)) for name, h in params.items()}
    lifted[m_name] = P.join(P.o.zero, m)
    m_term = Term.var(m_name)

    def radius_zero(t: Term) -> bool:
        if t.is_zero:
            return True
        (name, c), = t.coeffs
        return not any(H.scale(c, H.element(params[name])))

    def walk(g: Formula) -> Formula:
        if isinstance(g, (Le, Lt)):
            if g.lhs.coef(var) != 1 or len(g.rhs.coeffs) > 1:
                raise ValueError(f"not a ball atom: {g}")
            if not radius_zero(g.rhs):
                return g
            if isinstance(g, Le):
                return Lt(g.lhs, m_term)
            x = Term.var(var)
            return And((Lt(x, ZERO), Le(ZERO, x)))
        if isinstance(g, Not):
            return Not(walk(g.arg))
        if isinstance(g, (And, Or)):
            return type(g)(tuple(walk(a) for a in g.args))
        raise ValueError(f"not a boolean combination of balls: {g}")

    return walk(f), lifted


# ---------------------------------------------------------------------------
# rational interval sets


@dataclass(frozen=True)
class Interval:
    lo: Fraction | None  # None is -infinity
    hi: Fraction | None  # None is +infinity
    lo_closed: bool = False
    hi_closed: bool = False

    def is_empty(self) -> bool:
        if self.lo is None or self.hi is None:
            return False
        return self.lo > self.hi or (self.lo == self.hi and not (self.lo_closed and self.hi_closed))

    def contains(self, q) -> bool:
        if self.lo is not None and (q < self.lo or (q == self.lo and not self.lo_closed)):
            return False
        if self.hi is not None and (q > self.hi or (q == self.hi and not self.hi_closed)):
            return False
        return True

    def __str__(self):
        lo = "-inf" if self.lo is None else str(self.lo)
        hi = "+inf" if self.hi is None else str(self.hi)
        return ("[" if self.lo_closed else "(") + f"{lo}, {hi}" + ("]" if self.hi_closed else ")")


def _lo_key(iv: Interval):
    return (0, 0, 0) if iv.lo is None else (1, iv.lo, 0 if iv.lo_closed else 1)


def _intersect(a: Interval, b: Interval) -> Interval:
    if a.lo is None or (b.lo is not None and (b.lo > a.lo or (b.lo == a.lo and not b.lo_closed))):
        lo, lc = b.lo, b.lo_closed
    else:
        lo, lc = a.lo, a.lo_closed
    if a.hi is None or (b.hi is not None and (b.hi < a.hi or (b.hi == a.hi and not b.hi_closed))):
        hi, hc = b.hi, b.hi_closed
    else:
        hi, hc = a.hi, a.hi_closed
    return Interval(lo, hi, lc, hc)


class IntervalSet:
    """Finite union of rational intervals, kept sorted and merged."""

    def __init__(self, intervals=()):
        self.intervals = tuple(self._normalize(intervals))

    @staticmethod
    def _normalize(ivs):
        ivs = sorted((iv for iv in ivs if not iv.is_empty()), key=_lo_key)
        out = []
        for iv in ivs:
            if out:
                last = out[-1]
                touches = (
                    last.hi is None
                    or iv.lo is None
                    or iv.lo < last.hi
                    or (iv.lo == last.hi and (last.hi_closed or iv.lo_closed))
                )
                if touches:
                    if last.hi is None or (iv.hi is not None and (iv.hi < last.hi or (iv.hi == last.hi and not iv.hi_closed))):
                        continue
                    out[-1] = Interval(last.lo, iv.hi, last.lo_closed, iv.hi_closed)
                    continue
            out.append(iv)
        return out

    @staticmethod
    def full() -> "IntervalSet":
        return IntervalSet([Interval(None, None)])

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.intervals + other.intervals)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet([_intersect(a, b) for a in self.intervals for b in other.intervals])

    def complement(self) -> "IntervalSet":
        out = []
        lo, lc = None, False
        for iv in self.intervals:
            if iv.lo is not None:
                out.append(Interval(lo, iv.lo, lc, not iv.lo_closed))
            if iv.hi is None:
                return IntervalSet(out)
            lo, lc = iv.hi, not iv.hi_closed
        out.append(Interval(lo, None, lc, False))
        return IntervalSet(out)

    def contains(self, q) -> bool:
        return any(iv.contains(q) for iv in self.intervals)

    def endpoints(self) -> list:
        pts = set()
        for iv in self.intervals:
            pts.update(p for p in (iv.lo, iv.hi) if p is not None)
        return sorted(pts)

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def is_full(self) -> bool:
        return len(self.intervals) == 1 and self.intervals[0].lo is None and self.intervals[0].hi is None

    def __eq__(self, other):
        return isinstance(other, IntervalSet) and self.intervals == other.intervals

    def __hash__(self):
        return hash(self.intervals)

    def __str__(self):
        return " u ".join(str(iv) for iv in self.intervals) or "{}"


def _constraint_set(coeff_x: Fraction, const: Fraction, rel: str) -> IntervalSet:
    """Solutions of coeff_x * x + const REL 0."""
    if coeff_x == 0:
        holds = {LE: const <= 0, LT: const < 0, EQ: const == 0, NE: const != 0}[rel]
        return IntervalSet.full() if holds else IntervalSet()
    t = -const / coeff_x
    if rel == EQ:
        return IntervalSet([Interval(t, t, True, True)])
    if rel == NE:
        return IntervalSet([Interval(None, t), Interval(t, None)])
    closed = rel == LE
    if coeff_x > 0:
        return IntervalSet([Interval(None, t, False, closed)])
    return IntervalSet([Interval(t, None, closed, False)])


@functools.lru_cache(maxsize=4096)
def _qe_dnf(f: Formula):
    return constraints_of(f)


def solve_ordered(f: Formula, var: str, values: dict) -> IntervalSet:
    """{q in Q : Q |= f(q, values)} for a formula of the ordered language,
    computed exactly by quantifier elimination."""
    out = IntervalSet()
    for conj in _qe_dnf(f):
        acc = IntervalSet.full()
        for c in conj:
            cx = Fraction(0)
            const = Fraction(0)
            for name, k in c.coeffs:
                if name == var:
                    cx += k
                else:
                    const += k * Fraction(values[name])
            acc = acc.intersect(_constraint_set(cx, const, c.rel))
            if acc.is_empty:
                break
        out = out.union(acc)
    return out


# ---------------------------------------------------------------------------
# definable sets


@dataclass
class DefinableSet:
    """A one-variable definable set.

    mode "product": exact description as a rational interval set per coset
    of the valued part; mode "finite": exact member set; mode "window":
    window members plus the elements whose verdict is Unknown."""

    G: GroupSpec
    formula: Formula
    params: dict
    var: str
    mode: str
    members: frozenset = frozenset()
    unknown: frozenset = frozenset()
    cosets: dict = field(default_factory=dict)
    window: Window | None = None
    pairs: int = 0

    @property
    def exact(self) -> bool:
        return self.mode in ("product", "finite")

    def contains(self, g) -> bool | None:
        if self.mode == "product":
            go, gv = self.G.qo.split(g)
            return self.cosets.get(gv, IntervalSet()).contains(Fraction(go[0]))
        if g in self.members:
            return True
        if g in self.unknown:
            return None
        if self.mode == "finite" or (self.window and self.G.in_window(g, self.window)):
            return False
        return None

    def window_members(self, w: Window) -> set:
        return {g for g in self.G.elements(w) if self.contains(g)}

    def flags(self) -> dict:
        return {render_element(g): Truth3.UNKNOWN.value for g in sorted(self.unknown, key=str)}

    def describe(self) -> dict:
        out = {"mode": self.mode, "formula": str(self.formula), "exact": self.exact}
        if self.mode == "product":
            out["cosets"] = {render_element(h): str(s) for h, s in sorted(self.cosets.items())}
            out["pairs"] = self.pairs
        else:
            out["members"] = sorted(render_element(g) for g in self.members)
            out["unknown"] = len(self.unknown)
        return out


def exact_product_1d(G: GroupSpec) -> bool:
    return isinstance(G.qo, Product) and G.qo.o.divisible and G.qo.o.dim == 1 and G.qo.v.is_finite


DEFAULT_DEFINABLE_PAIR_CAP = 1 << 14


def definable_set(
    G: GroupSpec,
    f: Formula,
    w: Window | None = None,
    params: dict | None = None,
    var: str = "x",
    pair_limit: int = DEFAULT_DEFINABLE_PAIR_CAP,
) -> DefinableSet:
    """The subset of G defined by f(var, params)."""
    params = {k: G.element(v) for k, v in (params or {}).items()}
    missing = free_vars(f) - {var} - set(params)
    if missing:
        from .errors import UnboundVariable

        raise UnboundVariable(f"no value for {', '.join(sorted_names(missing))}")
    if exact_product_1d(G):
        if pair_count(nnf(f)) <= pair_limit:
            return _definable_product(G, f, params, var)
        return _definable_specialized(G, f, params, var)
    if G.is_finite:
        ev = Evaluator(G)
        env = dict(params)
        mem = set()
        for g in G.elements():
            env[var] = g
            if ev.value(f, env):
                mem.add(g)
        return DefinableSet(G, f, params, var, "finite", frozenset(mem))
    w = w or Window(4)
    ev = Evaluator(G, w, solve_equations=True)
    env = dict(params)
    mem, unk = set(), set()
    for g in G.elements(w):
        env[var] = g
        r = ev.value(f, env)
        if r is None:
            unk.add(g)
        elif r:
            mem.add(g)
    return DefinableSet(G, f, params, var, "window", frozenset(mem), frozenset(unk), window=w)


def _definable_product(G: GroupSpec, f: Formula, params: dict, var: str) -> DefinableSet:
    P = G.qo
    H = P.v
    split = {k: P.split(v) for k, v in params.items()}
    o_vals = {k: s[0][0] for k, s in split.items()}
    v_vals = {k: s[1] for k, s in split.items()}
    hev = Evaluator(H)
    fv = fv_decompose(nnf(f))
    cosets = {h: IntervalSet() for h in H.elements()}
    for o_side, v_side in fv:
        env = dict(v_vals)
        hs = []
        for h in H.elements():
            env[var] = h
            if hev.value(v_side, env):
                hs.append(h)
        if not hs:
            continue
        iset = solve_ordered(o_side, var, o_vals)
        if iset.is_empty:
            continue
        for h in hs:
            cosets[h] = cosets[h].union(iset)
    return DefinableSet(G, f, params, var, "product", cosets=cosets, pairs=fv.n)


def _definable_specialized(G: GroupSpec, f: Formula, params: dict, var: str) -> DefinableSet:
    """Same result without pairs: fix the H-components and solve over o."""
    P = G.qo
    split = {k: P.split(v) for k, v in params.items()}
    o_vals = {k: s[0][0] for k, s in split.items()}
    v_vals = {k: s[1] for k, s in split.items()}
    cosets = {}
    for h in P.v.elements():
        g = specialize(G, f, {**v_vals, var: h})
        cosets[h] = solve_ordered(g, var, o_vals)
    return DefinableSet(G, f, params, var, "product", cosets=cosets, pairs=0)


# ---------------------------------------------------------------------------
# swiss cheese normal forms


def cheese_normal_form(s, G: GroupSpec | None = None, w: Window | None = None) -> list:
    """Pairwise disjoint swiss cheeses whose union is s.

    s is a DefinableSet, or a plain element set of a finite group."""
    if not isinstance(s, DefinableSet):
        if G is None or not G.is_finite:
            raise NotRepresentable("plain element sets are only accepted for finite groups")
        return _finite_cover(G, set(s))
    if s.mode == "finite":
        return _finite_cover(s.G, set(s.members))
    if s.mode == "product":
        return _product_cheeses(s)
    return _window_cheeses(s)


def _finite_cover(G: GroupSpec, target: set) -> list:
    """Greedy cover: the ball meeting most uncovered points (and no point
    covered earlier) becomes the outer ball; maximal balls inside its
    surplus become the holes."""
    D = G.elements()
    index = {g: i for i, g in enumerate(D)}
    balls = {}
    for kind in ("closed", "open"):
        for c in D:
            for r in D:
                b = Ball(kind, c, r)
                mask = 0
                for g in D:
                    if b.contains(G, g):
                        mask |= 1 << index[g]
                if mask and mask not in balls:
                    balls[mask] = b
    target_mask = sum(1 << index[g] for g in target)
    remaining = target_mask
    out = []
    while remaining:
        covered = target_mask & ~remaining
        best = None
        for mask, b in balls.items():
            if mask & covered:
                continue
            gain = bin(mask & remaining).count("1")
            if not gain:
                continue
            surplus = mask & ~target_mask
            score = (gain, -bin(surplus).count("1"))
            if best is None or score > best[0]:
                best = (score, mask, b)
        _, mask, b = best
        surplus = mask & ~remaining
        holes = []
        while surplus:
            inner = [(m, hb) for m, hb in balls.items() if m & ~surplus == 0 and m & surplus]
            m, hb = max(inner, key=lambda t: bin(t[0]).count("1"))
            holes.append(hb)
            surplus &= ~m
        if b.kind == "closed" and not any(b.radius) and not holes:
            # a point is written as closed minus open, radius 0
            holes.append(Ball("open", b.center, b.radius))
        out.append(SwissCheese(b, tuple(holes)))
        remaining &= ~mask
    return out


def _h_balls(H: GroupSpec) -> list:
    """(member set, (kind, center, radius)) for every ball of H."""
    out = {}
    for kind in ("closed", "open"):
        for c in H.elements():
            for r in H.elements():
                mem = frozenset(
                    h for h in H.elements() if (H.lt if kind == "open" else H.le)(H.sub(h, c), r)
                )
                if mem and mem not in out:
                    out[mem] = (kind, c, r)
    return sorted(out.items(), key=lambda t: (-len(t[0]), sorted(t[0])))


def _product_cheeses(s: DefinableSet) -> list:
    G = s.G
    P = G.qo
    H = P.v
    m = min_nonzero(H)
    join = P.join
    ozero = P.o.zero
    out = []
    full = {h for h, iv in s.cosets.items() if iv.is_full}
    # unions of full cosets that form a ball of H are one ball of G
    for mem, (kind, c, r) in _h_balls(H):
        if len(mem) < 2 or not mem <= full:
            continue
        if not any(r):
            continue
        out.append(SwissCheese(Ball(kind, join(ozero, c), join(ozero, r))))
        full -= mem
    zero_r = G.zero
    for h in H.elements():
        iset = s.cosets.get(h, IntervalSet())
        if h in full:
            out.append(SwissCheese(Ball("open", join(ozero, h), join(ozero, m))))
            continue
        if iset.is_full or iset.is_empty:
            continue
        for iv in iset.intervals:

            def pt(q):
                return join((q if Fraction(q).denominator != 1 else int(q),), h)

            coset = Ball("open", join(ozero, h), join(ozero, m))
            if iv.lo is None:
                out.append(SwissCheese(Ball("closed" if iv.hi_closed else "open", pt(iv.hi), zero_r)))
                continue
            lower_hole = Ball("open" if iv.lo_closed else "closed", pt(iv.lo), zero_r)
            if iv.hi is None:
                out.append(SwissCheese(coset, (lower_hole,)))
            else:
                outer = Ball("closed" if iv.hi_closed else "open", pt(iv.hi), zero_r)
                out.append(SwissCheese(outer, (lower_hole,)))
    return out


def _window_cheeses(s: DefinableSet) -> list:
    if s.unknown:
        raise NotRepresentable(f"{len(s.unknown)} window elements have an Unknown verdict")
    G = s.G
    if not (isinstance(G.qo, Product) and G.qo.o.dim == 1 and G.qo.v.is_finite):
        raise NotRepresentable("windowed cheese construction needs o * H with a one-dimensional o and finite H")
    w = s.window
    runs_n = _runs(s, w)
    big = Window(2 * w.bound, w.max_den)
    s2 = definable_set(G, s.formula, big, s.params, s.var)
    if s2.unknown:
        raise NotRepresentable(f"{len(s2.unknown)} elements have an Unknown verdict at window {big.bound}")
    runs_2n = _runs(s2, big)
    count_n = sum(len(r) for r in runs_n.values())
    count_2n = sum(len(r) for r in runs_2n.values())
    if count_n != count_2n:
        raise NotRepresentable(
            f"interval count grows with the window ({count_n} at bound {w.bound}, {count_2n} at bound {big.bound})"
        )
    P = G.qo
    H = P.v
    m = min_nonzero(H)
    ozero = P.o.zero
    zero = G.zero
    out = []
    for h, runs in runs_n.items():
        coset = Ball("open", P.join(ozero, h), P.join(ozero, m))
        for lo, hi in runs:
            if lo is None and hi is None:
                out.append(SwissCheese(coset))
            elif lo is None:
                out.append(SwissCheese(Ball("closed", P.join((hi,), h), zero)))
            elif hi is None:
                out.append(SwissCheese(coset, (Ball("open", P.join((lo,), h), zero),)))
            else:
                out.append(SwissCheese(Ball("closed", P.join((hi,), h), zero), (Ball("open", P.join((lo,), h), zero),)))
    return out


def _runs(s: DefinableSet, w: Window) -> dict:
    """Maximal runs of consecutive o-coordinates per coset; runs touching
    the window edge are open-ended (None)."""
    G = s.G
    P = G.qo
    vals = sorted(P.o.coordinate_values(0, w))
    out = {}
    for h in P.v.elements():
        runs = []
        start = None
        for i, q in enumerate(vals):
            inside = P.join((q,), h) in s.members
            if inside and start is None:
                start = i
            if not inside and start is not None:
                runs.append((start, i - 1))
                start = None
        if start is not None:
            runs.append((start, len(vals) - 1))
        out[h] = [
            (None if a == 0 else vals[a], None if b == len(vals) - 1 else vals[b]) for a, b in runs
        ]
    return out


def verify_cheeses(s: DefinableSet, cheeses: list) -> list:
    """Points where the cheeses fail to partition s (empty when exact).

    In product mode the test points are every interval endpoint, a point
    strictly between consecutive endpoints and points beyond the extremes,
    in every coset; both sides are constant between endpoints, so this
    check is exact."""
    G = s.G
    if s.mode == "product":
        P = G.qo
        pts = set()
        for iv in s.cosets.values():
            pts.update(iv.endpoints())
        for c in cheeses:
            for b in (c.outer, *c.holes):
                pts.add(Fraction(P.split(b.center)[0][0]))
        pts = sorted(pts)
        probes = set(pts)
        if pts:
            probes.update({pts[0] - 1, pts[-1] + 1})
            probes.update((a + b) / 2 for a, b in zip(pts, pts[1:]))
        else:
            probes.add(Fraction(0))
        points = [P.join((int(q) if q.denominator == 1 else q,), h) for h in P.v.elements() for q in sorted(probes)]
    elif s.mode == "finite":
        points = G.elements()
    else:
        points = G.elements(s.window)
    bad = []
    for g in points:
        want = s.contains(g)
        if want is None:
            continue
        hits = sum(1 for c in cheeses if c.contains(G, g))
        if hits != (1 if want else 0):
            bad.append((g, want, hits))
    return bad


@dataclass
class ProbeResult:
    formula: str
    representable: bool
    cheeses: int = 0
    detail: str = ""


def cminimality_probe(G: GroupSpec, formulas, params: dict | None = None, w: Window | None = None, var: str = "x") -> dict:
    """Run definable_set and cheese_normal_form on every formula."""
    results = []
    for f in formulas:
        if isinstance(f, str):
            from .logic.parser import parse

            f = parse(f)
        try:
            ds = definable_set(G, f, w, params, var)
            if not ds.exact:
                cheeses = cheese_normal_form(ds)
                bad = verify_cheeses(ds, cheeses)
                results.append(ProbeResult(str(f), not bad, len(cheeses), "windowed"))
                continue
            cheeses = cheese_normal_form(ds)
            bad = verify_cheeses(ds, cheeses)
            detail = "" if not bad else f"membership mismatch at {render_element(bad[0][0])}"
            results.append(ProbeResult(str(f), not bad, len(cheeses), detail))
        except NotRepresentable as e:
            results.append(ProbeResult(str(f), False, 0, f"NotRepresentable: {e}"))
    failures = [r for r in results if not r.representable]
    return {
        "group": G.name,
        "formulas": len(results),
        "representable": len(results) - len(failures),
        "max_cheeses": max((r.cheeses for r in results), default=0),
        "failures": [{"formula": r.formula, "detail": r.detail} for r in failures],
        "results": [r.__dict__ for r in results],
    }
