"""Specializing formulas about o * H (H finite) to formulas about o.

Once the H-component of every variable is fixed, each atom either has a
constant truth value or becomes an order atom between o-components.
Quantifiers range over H-components by finite disjunction (conjunction)
and over o-components symbolically, so the result is a formula of the
ordered language that quantifier elimination can decide.
"""
from __future__ import annotations

from ..groups import GroupSpec, Product
from .formula import (
    FALSE,
    TRUE,
    And,
    Const,
    Exists,
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
    expand,
)


def _v_value(H: GroupSpec, t: Term, env: dict):
    acc = H.zero
    for name, c in t.coeffs:
        acc = H.add(acc, H.scale(c, env[name]))
    return acc


def _and(parts) -> Formula:
    parts = [p for p in parts if p != TRUE]
    return FALSE if FALSE in parts else conj(*parts)


def _or(parts) -> Formula:
    parts = [p for p in parts if p != FALSE]
    return TRUE if TRUE in parts else disj(*parts)


def specialize(G: GroupSpec, f: Formula, v_env: dict) -> Formula:
    """A formula about the ordered part equivalent to f once every free
    variable's H-component is fixed by v_env."""
    if not (isinstance(G.qo, Product) and G.qo.o.dim == 1 and G.qo.v.is_finite):
        raise ValueError("specialize needs o * H with a one-dimensional o and finite H")
    H = G.qo.v
    hs = H.elements()

    def walk(g: Formula, env: dict) -> Formula:
        if isinstance(g, IsZero):
            return g if not any(_v_value(H, g.term, env)) else FALSE
        if isinstance(g, Le):
            pv, qv = _v_value(H, g.lhs, env), _v_value(H, g.rhs, env)
            if any(qv):
                return TRUE if not any(pv) or H.le(pv, qv) else FALSE
            return g if not any(pv) else FALSE
        if isinstance(g, (Lt, Sim, InGo)):
            return walk(expand(g), env)
        if isinstance(g, Const):
            return g
        if isinstance(g, Not):
            a = walk(g.arg, env)
            return Const(not a.value) if isinstance(a, Const) else Not(a)
        if isinstance(g, And):
            return _and([walk(a, env) for a in g.args])
        if isinstance(g, Or):
            return _or([walk(a, env) for a in g.args])
        parts = []
        for h in hs:
            body = walk(g.body, {**env, g.var: h})
            parts.append(body if isinstance(body, Const) else type(g)(g.var, body))
        return _or(parts) if isinstance(g, Exists) else _and(parts)

    return walk(f, dict(v_env))
