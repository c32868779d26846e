"""Quantifier elimination for divisible ordered abelian groups.

Atoms become linear constraints sum(c_i * x_i) REL 0 with REL one of
<=, <, =, !=.  An existential over a conjunction is removed by solving an
equation for the variable if there is one, otherwise by splitting != into
two strict inequalities and pairing every lower bound with every upper
bound (Fourier-Motzkin).  Density and the absence of endpoints make this
exact.  Coefficients stay integral by cross-multiplying with positive
factors.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from ..errors import NotOrderFragment
from .formula import (
    FALSE,
    TRUE,
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
    conj,
    disj,
)

LE, LT, EQ, NE = "<=", "<", "=", "!="
_NEGATE = {LE: LT, LT: LE, EQ: NE, NE: EQ}  # with the term negated for LE/LT


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple  # sorted ((name, int), ...)
    rel: str

    @staticmethod
    def make(d: dict, rel: str) -> "Constraint":
        items = {k: v for k, v in d.items() if v}
        g = 0
        for v in items.values():
            g = math.gcd(g, abs(v))
        if g > 1:
            items = {k: v // g for k, v in items.items()}
        if rel in (EQ, NE) and items:
            # canonical sign for symmetric relations
            lead = Term.of(items).coeffs[0][1]
            if lead < 0:
                items = {k: -v for k, v in items.items()}
        return Constraint(Term.of(items).coeffs, rel)

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def coef(self, x: str) -> int:
        return self.as_dict().get(x, 0)

    def ground_value(self) -> bool | None:
        if self.coeffs:
            return None
        return {LE: True, LT: False, EQ: True, NE: False}[self.rel]

    def negate(self) -> "Constraint":
        if self.rel in (EQ, NE):
            return Constraint(self.coeffs, _NEGATE[self.rel])
        return Constraint.make({k: -v for k, v in self.coeffs}, _NEGATE[self.rel])

    def to_formula(self) -> Formula:
        pos = Term.of({k: v for k, v in self.coeffs if v > 0})
        neg = Term.of({k: -v for k, v in self.coeffs if v < 0})
        if self.rel == LE:
            return Le(pos, neg)
        if self.rel == LT:
            return Lt(pos, neg)
        t = Term(self.coeffs)
        return IsZero(t) if self.rel == EQ else Not(IsZero(t))


def _lin(a: dict, ka: int, b: dict, kb: int) -> dict:
    out = {k: ka * v for k, v in a.items()}
    for k, v in b.items():
        out[k] = out.get(k, 0) + kb * v
    return out


# ---------------------------------------------------------------------------
# formulas to constraint DNF


def _atom_constraints(f: Formula, strict: bool) -> Formula:
    """Rewrite one atom into a formula over constraint leaves."""
    if isinstance(f, Le):
        return Constraint.make((f.lhs - f.rhs).as_dict(), LE)
    if isinstance(f, Lt):
        return Constraint.make((f.lhs - f.rhs).as_dict(), LT)
    if isinstance(f, IsZero):
        return Constraint.make(f.term.as_dict(), EQ)
    if isinstance(f, Sim):
        if strict:
            raise NotOrderFragment("~ refers to quasi-order classes")
        return Constraint.make((f.lhs - f.rhs).as_dict(), EQ)
    if isinstance(f, InGo):
        if strict:
            raise NotOrderFragment("'in Go' refers to quasi-order classes")
        return TRUE
    raise NotOrderFragment(f"unsupported atom {f!r}")


def _dnf(f, positive: bool = True) -> list:
    """DNF of a quantifier-free formula as a list of frozensets of
    constraints; an empty list is false, [frozenset()] is true."""
    if isinstance(f, Constraint):
        c = f if positive else f.negate()
        v = c.ground_value()
        if v is None:
            return [frozenset([c])]
        return [frozenset()] if v else []
    if isinstance(f, Const):
        return [frozenset()] if f.value == positive else []
    if isinstance(f, Not):
        return _dnf(f.arg, not positive)
    if isinstance(f, (And, Or)):
        is_and = isinstance(f, And) == positive
        parts = [_dnf(a, positive) for a in f.args]
        if not is_and:
            return _prune([c for p in parts for c in p])
        acc = [frozenset()]
        for p in parts:
            acc = _prune([a | b for a in acc for b in p])
            if not acc:
                break
        return acc
    raise TypeError(f"unexpected node {f!r}")


def _prune(cs: list) -> list:
    seen = set()
    out = []
    for c in cs:
        if c in seen:
            continue
        seen.add(c)
        if _satisfiable(c):
            out.append(c)
    return out


# ---------------------------------------------------------------------------
# elimination


def _eliminate(x: str, conj_: frozenset, prune=None) -> list:
    """Disjunction (list of conjunctions) equivalent to EX x. conj_."""
    prune = prune or _prune
    rest = [c for c in conj_ if not c.coef(x)]
    mine = [c for c in conj_ if c.coef(x)]
    if not mine:
        return [frozenset(rest)]
    eqs = [c for c in mine if c.rel == EQ]
    if eqs:
        e = eqs[0]
        ce = e.coef(x)
        ed = e.as_dict()
        out = set(rest)
        for c in mine:
            if c is e:
                continue
            a = c.coef(x)
            d = _lin(c.as_dict(), abs(ce), ed, -a * (1 if ce > 0 else -1))
            d.pop(x, None)
            k = Constraint.make(d, c.rel)
            v = k.ground_value()
            if v is False:
                return []
            if v is None:
                out.add(k)
        return [frozenset(out)]
    nes = [c for c in mine if c.rel == NE]
    if nes:
        # x != p splits into x < p or x > p
        c = nes[0]
        others = conj_ - {c}
        lo = Constraint.make(c.as_dict(), LT)
        hi = Constraint.make({k: -v for k, v in c.coeffs}, LT)
        return prune(_eliminate(x, others | {lo}, prune) + _eliminate(x, others | {hi}, prune))
    lower = [c for c in mine if c.coef(x) < 0]
    upper = [c for c in mine if c.coef(x) > 0]
    out = set(rest)
    for lc, uc in itertools.product(lower, upper):
        al, au = lc.coef(x), uc.coef(x)
        d = _lin(lc.as_dict(), au, uc.as_dict(), -al)
        d.pop(x, None)
        rel = LT if LT in (lc.rel, uc.rel) else LE
        k = Constraint.make(d, rel)
        v = k.ground_value()
        if v is False:
            return []
        if v is None:
            out.add(k)
    return [frozenset(out)]


def _satisfiable(c: frozenset) -> bool:
    cur = [c]
    names = sorted({k for k_ in c for k, _ in k_.coeffs})
    for x in names:
        nxt = []
        for cc in cur:
            nxt.extend(_eliminate(x, cc, _dedupe))
        cur = nxt
        if not cur:
            return False
    return bool(cur)


def _dedupe(cs):
    return list(dict.fromkeys(cs))


# ---------------------------------------------------------------------------
# driver


def _qf(f: Formula, strict: bool):
    """Quantifier-free equivalent, with constraint leaves."""
    if isinstance(f, (Le, Lt, IsZero, Sim, InGo)):
        return _atom_constraints(f, strict)
    if isinstance(f, Const):
        return f
    if isinstance(f, Not):
        return Not(_qf(f.arg, strict))
    if isinstance(f, And):
        return And(tuple(_qf(a, strict) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(_qf(a, strict) for a in f.args))
    if isinstance(f, Exists):
        body = _dnf(_qf(f.body, strict))
        return _from_dnf(_prune([k for c in body for k in _eliminate(f.var, c)]))
    if isinstance(f, ForAll):
        body = _dnf(_qf(f.body, strict), positive=False)
        return Not(_from_dnf(_prune([k for c in body for k in _eliminate(f.var, c)])))
    raise NotOrderFragment(f"unsupported node {f!r}")


def _from_dnf(dnf: list):
    """Rebuild a formula whose leaves are Constraint objects."""
    if not dnf:
        return FALSE
    parts = []
    for c in dnf:
        items = sorted(c, key=lambda k: (k.coeffs, k.rel))
        parts.append(And(tuple(items)) if len(items) > 1 else (items[0] if items else TRUE))
    return Or(tuple(parts)) if len(parts) > 1 else parts[0]


def _render(dnf: list) -> Formula:
    if not dnf:
        return FALSE
    parts = []
    for c in sorted(dnf, key=lambda s: sorted((k.coeffs, k.rel) for k in s)):
        strict = {k.coeffs for k in c if k.rel == LT}
        items = sorted((k for k in c if not (k.rel == LE and k.coeffs in strict)), key=lambda k: (k.coeffs, k.rel))
        parts.append(conj(*(k.to_formula() for k in items)))
    if any(p == TRUE for p in parts):
        return TRUE
    return disj(*parts)


def qe_doag(f: Formula, strict: bool = False) -> Formula:
    """Quantifier-free formula equivalent to f over every divisible ordered
    abelian group.  With strict=True the class predicates ~ and 'in Go'
    are rejected instead of being read with their order meaning."""
    return _render(_dnf(_qf(f, strict)))


def constraints_of(f: Formula, strict: bool = False) -> list:
    """DNF of qe_doag(f) as a list of constraint sets."""
    return _dnf(_qf(f, strict))
