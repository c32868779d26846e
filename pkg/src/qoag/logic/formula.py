"""Terms and formulas of the language {0, +, -, <~}, with a printer."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable


def _natural(name: str):
    m = re.fullmatch(r"([A-Za-z_]+)(\d*)", name)
    if m:
        return (m.group(1), int(m.group(2) or -1), name)
    return (name, -1, name)


@dataclass(frozen=True)
class Term:
    """Integer linear combination of identifiers, kept canonical."""

    coeffs: tuple = ()

    @staticmethod
    def of(mapping: dict) -> "Term":
        items = [(k, int(v)) for k, v in mapping.items() if v]
        return Term(tuple(sorted(items, key=lambda kv: _natural(kv[0]))))

    @staticmethod
    def var(name: str, coef: int = 1) -> "Term":
        return Term.of({name: coef})

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def __add__(self, other: "Term") -> "Term":
        d = self.as_dict()
        for k, v in other.coeffs:
            d[k] = d.get(k, 0) + v
        return Term.of(d)

    def __neg__(self) -> "Term":
        return Term(tuple((k, -v) for k, v in self.coeffs))

    def __sub__(self, other: "Term") -> "Term":
        return self + (-other)

    def scale(self, k: int) -> "Term":
        return Term.of({n: k * v for n, v in self.coeffs})

    def coef(self, name: str) -> int:
        return self.as_dict().get(name, 0)

    def without(self, name: str) -> "Term":
        return Term(tuple((k, v) for k, v in self.coeffs if k != name))

    def names(self) -> set:
        return {k for k, _ in self.coeffs}

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        out = []
        for i, (name, c) in enumerate(self.coeffs):
            mag = abs(c)
            body = name if mag == 1 else f"{mag}*{name}"
            if i == 0:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append((" - " if c < 0 else " + ") + body)
        return "".join(out)


ZERO = Term()


class Formula:
    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Le(Formula):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class IsZero(Formula):
    term: Term


@dataclass(frozen=True)
class Lt(Formula):
    """Derived: lhs <~ rhs and not rhs <~ lhs."""

    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Sim(Formula):
    """Derived: lhs <~ rhs and rhs <~ lhs."""

    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class InGo(Formula):
    """Derived: term = 0 or not (-term ~ term)."""

    term: Term


@dataclass(frozen=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple


@dataclass(frozen=True)
class Or(Formula):
    args: tuple


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ForAll(Formula):
    var: str
    body: Formula


TRUE = Const(True)
FALSE = Const(False)
ATOMS = (Le, IsZero, Lt, Sim, InGo, Const)


def conj(*args: Formula) -> Formula:
    args = tuple(args)
    if not args:
        return TRUE
    if len(args) == 1:
        return args[0]
    return And(args)


def disj(*args: Formula) -> Formula:
    args = tuple(args)
    if not args:
        return FALSE
    if len(args) == 1:
        return args[0]
    return Or(args)


def implies(a: Formula, b: Formula) -> Formula:
    return Or((Not(a), b))


# ---------------------------------------------------------------------------
# traversal helpers


def children(f: Formula) -> tuple:
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, (Exists, ForAll)):
        return (f.body,)
    return ()


def atom_terms(f: Formula) -> tuple:
    if isinstance(f, (Le, Lt, Sim)):
        return (f.lhs, f.rhs)
    if isinstance(f, (IsZero, InGo)):
        return (f.term,)
    return ()


def free_vars(f: Formula) -> set:
    if isinstance(f, ATOMS):
        out = set()
        for t in atom_terms(f):
            out |= t.names()
        return out
    if isinstance(f, (Exists, ForAll)):
        return free_vars(f.body) - {f.var}
    out = set()
    for c in children(f):
        out |= free_vars(c)
    return out


def all_vars(f: Formula) -> set:
    out = set()
    for t in atom_terms(f):
        out |= t.names()
    if isinstance(f, (Exists, ForAll)):
        out.add(f.var)
    for c in children(f):
        out |= all_vars(c)
    return out


def quantifier_rank(f: Formula) -> int:
    if isinstance(f, (Exists, ForAll)):
        return 1 + quantifier_rank(f.body)
    return max((quantifier_rank(c) for c in children(f)), default=0)


def is_quantifier_free(f: Formula) -> bool:
    return quantifier_rank(f) == 0


def sorted_names(names: Iterable[str]) -> list:
    return sorted(names, key=_natural)


def size(f: Formula) -> int:
    return 1 + sum(size(c) for c in children(f))


def rename_free(f: Formula, old: str, new: str) -> Formula:
    """Substitute the identifier `new` for free occurrences of `old`."""

    def ren(t: Term) -> Term:
        c = t.coef(old)
        return t if not c else t.without(old) + Term.var(new, c)

    if isinstance(f, Le):
        return Le(ren(f.lhs), ren(f.rhs))
    if isinstance(f, Lt):
        return Lt(ren(f.lhs), ren(f.rhs))
    if isinstance(f, Sim):
        return Sim(ren(f.lhs), ren(f.rhs))
    if isinstance(f, IsZero):
        return IsZero(ren(f.term))
    if isinstance(f, InGo):
        return InGo(ren(f.term))
    if isinstance(f, Const):
        return f
    if isinstance(f, Not):
        return Not(rename_free(f.arg, old, new))
    if isinstance(f, And):
        return And(tuple(rename_free(a, old, new) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(rename_free(a, old, new) for a in f.args))
    if f.var == old:
        return f
    return type(f)(f.var, rename_free(f.body, old, new))


def expand(f: Formula) -> Formula:
    """Macro-expand the derived predicates into <~ and = 0 atoms."""
    if isinstance(f, Lt):
        return And((Le(f.lhs, f.rhs), Not(Le(f.rhs, f.lhs))))
    if isinstance(f, Sim):
        return And((Le(f.lhs, f.rhs), Le(f.rhs, f.lhs)))
    if isinstance(f, InGo):
        t = f.term
        return Or((IsZero(t), Not(And((Le(-t, t), Le(t, -t))))))
    if isinstance(f, (Le, IsZero, Const)):
        return f
    if isinstance(f, Not):
        return Not(expand(f.arg))
    if isinstance(f, And):
        return And(tuple(expand(a) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(expand(a) for a in f.args))
    return type(f)(f.var, expand(f.body))


# ---------------------------------------------------------------------------
# printing

_PREC = {Or: 1, And: 2}


def to_text(f: Formula, ctx: int = 0) -> str:
    if isinstance(f, Le):
        return f"{f.lhs} <~ {f.rhs}"
    if isinstance(f, Lt):
        return f"{f.lhs} << {f.rhs}"
    if isinstance(f, Sim):
        return f"{f.lhs} ~ {f.rhs}"
    if isinstance(f, IsZero):
        return f"{f.term} = 0"
    if isinstance(f, InGo):
        t = f.term
        inner = str(t) if len(t.coeffs) <= 1 and (not t.coeffs or t.coeffs[0][1] > 0) else f"({t})"
        return f"{inner} in Go"
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Not):
        return f"!({to_text(f.arg, 0)})"
    if isinstance(f, (And, Or)):
        p = _PREC[type(f)]
        sep = " & " if isinstance(f, And) else " | "
        s = sep.join(to_text(a, p + 1) for a in f.args)
        return f"({s})" if ctx > p else s
    q = "EX" if isinstance(f, Exists) else "ALL"
    s = f"{q} {f.var}. {to_text(f.body, 0)}"
    return f"({s})" if ctx > 0 else s


def nnf(f: Formula, positive: bool = True) -> Formula:
    """Negation normal form: negations only directly above atoms."""
    if isinstance(f, ATOMS):
        if isinstance(f, Const):
            return Const(f.value == positive)
        return f if positive else Not(f)
    if isinstance(f, Not):
        return nnf(f.arg, not positive)
    if isinstance(f, (And, Or)):
        cls = type(f) if positive else (Or if isinstance(f, And) else And)
        return cls(tuple(nnf(a, positive) for a in f.args))
    if isinstance(f, Exists):
        return (Exists if positive else ForAll)(f.var, nnf(f.body, positive))
    return (ForAll if positive else Exists)(f.var, nnf(f.body, positive))
