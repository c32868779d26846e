"""Formula translations between a compatible group and its two parts.

relativize_o maps a formula about the ordered part G° to one about G by
bounding every quantifier with the definable predicate 'in Go'.
translate_v maps a formula about the valued part G/G° to one about G.
fv_decompose splits a formula about o * v into pairs (phi_o, phi_v) such
that o * v satisfies it iff some pair is satisfied by the two components.
"""
from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass

from .formula import (
    ZERO,
    And,
    Const,
    Exists,
    ForAll,
    Formula,
    InGo,
    IsZero,
    Le,
    Lt,
    Not,
    Or,
    Sim,
    Term,
    all_vars,
    conj,
    expand,
    nnf,
    free_vars,
    rename_free,
)

DEFAULT_PAIR_CAP = 2**20
# Counts are exact up to 2**_SATURATE and reported as infinity beyond.
_SATURATE = 4096


def pair_cap() -> int:
    raw = os.environ.get("QOAG_PAIR_CAP")
    return int(raw) if raw else DEFAULT_PAIR_CAP


# ---------------------------------------------------------------------------
# prenex form


def _fresh(used: set, base: str = "y") -> str:
    i = 1
    while f"{base}{i}" in used:
        i += 1
    name = f"{base}{i}"
    used.add(name)
    return name


def standardize_apart(f: Formula) -> Formula:
    """Rename bound variables that clash with a free variable or with an
    earlier binder, so every binder is distinct."""
    used = set(all_vars(f))
    seen = set(free_vars(f))

    def walk(g: Formula) -> Formula:
        if isinstance(g, (Exists, ForAll)):
            var, body = g.var, g.body
            if var in seen:
                new = _fresh(used)
                body = rename_free(body, var, new)
                var = new
            seen.add(var)
            return type(g)(var, walk(body))
        if isinstance(g, Not):
            return Not(walk(g.arg))
        if isinstance(g, (And, Or)):
            return type(g)(tuple(walk(a) for a in g.args))
        return g

    return walk(f)


def _prenex_parts(f: Formula):
    if isinstance(f, (Exists, ForAll)):
        prefix, matrix = _prenex_parts(f.body)
        return [(type(f), f.var)] + prefix, matrix
    if isinstance(f, Not):
        prefix, matrix = _prenex_parts(f.arg)
        flipped = [(ForAll if q is Exists else Exists, v) for q, v in prefix]
        return flipped, Not(matrix)
    if isinstance(f, (And, Or)):
        prefix, mats = [], []
        for a in f.args:
            p, m = _prenex_parts(a)
            prefix += p
            mats.append(m)
        return prefix, type(f)(tuple(mats))
    return [], f


def prenex_parts(f: Formula):
    """(prefix, matrix) with prefix a list of (Exists|ForAll, var)."""
    return _prenex_parts(standardize_apart(f))


def prenex(f: Formula) -> Formula:
    prefix, matrix = prenex_parts(f)
    for q, v in reversed(prefix):
        matrix = q(v, matrix)
    return matrix


# ---------------------------------------------------------------------------
# the ordered part


def relativize_o(f: Formula) -> Formula:
    """phi^o: prenex form with every quantifier bounded by 'y in Go'."""
    prefix, matrix = prenex_parts(f)
    for q, v in reversed(prefix):
        guard = InGo(Term.var(v))
        if q is Exists:
            matrix = Exists(v, And((guard, matrix)))
        else:
            matrix = ForAll(v, Or((Not(guard), matrix)))
    return matrix


# ---------------------------------------------------------------------------
# the valued part


def translate_v(f: Formula) -> Formula:
    """phi^v by structural induction; derived predicates are expanded."""
    if isinstance(f, IsZero):
        return InGo(f.term)
    if isinstance(f, Le):
        p, q = f.lhs, f.rhs
        return Or((And((InGo(p), InGo(q))), And((Not(InGo(q)), f))))
    if isinstance(f, (Lt, Sim, InGo)):
        return translate_v(expand(f))
    if isinstance(f, Const):
        return f
    if isinstance(f, Not):
        return Not(translate_v(f.arg))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(translate_v(a) for a in f.args))
    return type(f)(f.var, translate_v(f.body))


# ---------------------------------------------------------------------------
# Feferman-Vaught pairs


class PairSeq:
    """Lazily indexed sequence of (phi_o, phi_v) pairs."""

    count: int | float

    def __len__(self):
        if self.count == math.inf:
            raise OverflowError("pair count exceeds the representable range")
        return self.count

    def __iter__(self):
        i = 0
        while i < self.count:
            yield self[i]
            i += 1

    def __getitem__(self, i):
        if not 0 <= i < self.count:
            raise IndexError(i)
        return self._get(i)


class _Leaf(PairSeq):
    def __init__(self, pairs):
        self.pairs = tuple(pairs)
        self.count = len(self.pairs)

    def _get(self, i):
        return self.pairs[i]


class _Concat(PairSeq):
    def __init__(self, parts):
        self.parts = parts
        self.count = sum(p.count for p in parts)

    def _get(self, i):
        for p in self.parts:
            if i < p.count:
                return p[i]
            i -= p.count
        raise IndexError(i)


class _Product(PairSeq):
    def __init__(self, parts):
        self.parts = parts
        self.count = math.prod(p.count for p in parts)

    def _get(self, i):
        os_, vs = [], []
        for p in reversed(self.parts):
            i, r = divmod(i, p.count)
            o, v = p[r]
            os_.append(o)
            vs.append(v)
        return conj(*reversed(os_)), conj(*reversed(vs))


class _Exists(PairSeq):
    def __init__(self, var, inner):
        self.var = var
        self.inner = inner
        self.count = inner.count

    def _get(self, i):
        o, v = self.inner[i]
        return Exists(self.var, o), Exists(self.var, v)


class _PowerSet(PairSeq):
    """Pair I (bitmask) is (AND_{i in I} not psi_i^o, AND_{i not in I} not psi_i^v)."""

    def __init__(self, inner):
        self.inner = inner
        k = inner.count
        self.count = math.inf if k > _SATURATE else 2**k

    def _get(self, mask):
        os_, vs = [], []
        for j in range(self.inner.count):
            o, v = self.inner[j]
            if mask >> j & 1:
                os_.append(Not(o))
            else:
                vs.append(Not(v))
        return conj(*os_), conj(*vs)


@dataclass
class FvPairs:
    n: int | float
    pairs: PairSeq
    formula: Formula

    def __iter__(self):
        return iter(self.pairs)

    def to_list(self) -> list:
        return list(self.pairs)


def _fv(f: Formula) -> PairSeq:
    if isinstance(f, IsZero) or isinstance(f, Const):
        return _Leaf([(f, f)])
    if isinstance(f, Le):
        p, q = f.lhs, f.rhs
        return _Leaf(
            [
                (IsZero(ZERO), And((Not(IsZero(q)), f))),
                (f, And((IsZero(q), IsZero(p)))),
            ]
        )
    if isinstance(f, Or):
        return _Concat([_fv(a) for a in f.args])
    if isinstance(f, And):
        return _Product([_fv(a) for a in f.args])
    if isinstance(f, Exists):
        return _Exists(f.var, _fv(f.body))
    if isinstance(f, ForAll):
        return _PowerSet(_Exists(f.var, _fv(nnf(Not(f.body)))))
    if isinstance(f, Not):
        return _PowerSet(_fv(f.arg))
    raise TypeError(f"unexpected node {f!r}")


def fv_decompose(f: Formula, cap: int | None = None) -> FvPairs:
    """Pairs for f following the inductive construction.  Derived atoms
    are expanded first; And is the product of the pair lists and ALL x. b
    is read as not-EX x of the negation normal form of not-b.  Warns when the count exceeds the cap."""
    cap = pair_cap() if cap is None else cap
    g = expand(f)
    seq = _fv(g)
    if seq.count > cap:
        warnings.warn(f"fv_decompose produced {seq.count} pairs (cap {cap})", RuntimeWarning, stacklevel=2)
    return FvPairs(seq.count, seq, g)


def pair_count(f: Formula) -> int | float:
    """Number of pairs fv_decompose produces, computed structurally."""
    return _count(expand(f))


def _count(f: Formula):
    if isinstance(f, (IsZero, Const)):
        return 1
    if isinstance(f, Le):
        return 2
    if isinstance(f, Or):
        return sum(_count(a) for a in f.args)
    if isinstance(f, And):
        return math.prod(_count(a) for a in f.args)
    if isinstance(f, Exists):
        return _count(f.body)
    if isinstance(f, ForAll):
        return _count(Not(Exists(f.var, nnf(Not(f.body)))))
    if isinstance(f, Not):
        k = _count(f.arg)
        return math.inf if k > _SATURATE else 2**k
    raise TypeError(f"unexpected node {f!r}")


def dedupe_pairs(fv: FvPairs) -> list:
    """Materialized pair list with syntactically equal pairs removed."""
    return list(dict.fromkeys(fv.pairs))
