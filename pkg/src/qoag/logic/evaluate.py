"""Three-valued satisfaction of formulas in a GroupSpec.

Finite groups are evaluated exactly.  On infinite groups quantifiers range
over a window, so an existential without a witness (or a universal without
a counterexample) is Unknown.  When a quantified variable is pinned down by
an equation conjunct n*x + R = 0 (or a disequation disjunct under ALL) the
finitely many solutions are enumerated in the whole group, which keeps the
verdict exact.  That refinement is opt-in (solve_equations=True); plain
window semantics is the default.
"""
from __future__ import annotations

import itertools
from enum import Enum
from fractions import Fraction

from ..errors import UnboundVariable
from ..groups import GroupSpec, Window
from .formula import (
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
    free_vars,
    sorted_names,
)


class Truth3(Enum):
    TRUE = "True"
    FALSE = "False"
    UNKNOWN = "Unknown"

    @staticmethod
    def of(b) -> "Truth3":
        if b is None:
            return Truth3.UNKNOWN
        return Truth3.TRUE if b else Truth3.FALSE

    def as_bool(self):
        return None if self is Truth3.UNKNOWN else self is Truth3.TRUE

    @property
    def definite(self) -> bool:
        return self is not Truth3.UNKNOWN


DEFAULT_WINDOW = Window(4)


class Evaluator:
    """Compiles formulas against one group and window; reusable across
    assignments.  Internally truth values are True, False or None."""

    def __init__(self, G: GroupSpec, w: Window | None = None, solve_equations: bool = False):
        self.G = G
        self.solve_equations = solve_equations
        self.w = None if G.is_finite else (w or DEFAULT_WINDOW)
        self.domain = G.elements(self.w)
        self.exact = G.is_finite
        self._compiled = {}

    # -- public ------------------------------------------------------------
    def truth(self, f: Formula, assignment: dict | None = None) -> Truth3:
        return Truth3.of(self.value(f, assignment))

    def value(self, f: Formula, assignment: dict | None = None):
        env = {}
        assignment = assignment or {}
        for name in free_vars(f):
            if name not in assignment:
                raise UnboundVariable(f"free variable {name} has no value")
        for name, g in assignment.items():
            env[name] = self.G.element(g)
        fn = self._compiled.get(f)
        if fn is None:
            fn = self._compile(f, frozenset())
            self._compiled[f] = fn
        return fn(env)

    # -- compilation -------------------------------------------------------
    def _term(self, t: Term):
        G = self.G
        items = t.coeffs
        zero = G.zero
        if not items:
            return lambda env: zero
        if len(items) == 1:
            name, c = items[0]
            if c == 1:
                return lambda env: env[name]
            return lambda env: G.scale(c, env[name])

        def val(env):
            acc = zero
            for name, c in items:
                acc = G.add(acc, G.scale(c, env[name]) if c != 1 else env[name])
            return acc

        return val

    def _compile(self, f: Formula, bound: frozenset):
        G = self.G
        key = G.key
        if isinstance(f, Const):
            v = f.value
            return lambda env: v
        if isinstance(f, Le):
            a, b = self._term(f.lhs), self._term(f.rhs)
            return lambda env: key(a(env)) <= key(b(env))
        if isinstance(f, Lt):
            a, b = self._term(f.lhs), self._term(f.rhs)
            return lambda env: key(a(env)) < key(b(env))
        if isinstance(f, Sim):
            a, b = self._term(f.lhs), self._term(f.rhs)
            return lambda env: key(a(env)) == key(b(env))
        if isinstance(f, IsZero):
            a = self._term(f.term)
            return lambda env: not any(a(env))
        if isinstance(f, InGo):
            a = self._term(f.term)
            return lambda env: G.is_o(a(env))
        if isinstance(f, Not):
            inner = self._compile(f.arg, bound)

            def neg(env):
                r = inner(env)
                return None if r is None else not r

            return neg
        if isinstance(f, And):
            parts = [self._compile(a, bound) for a in f.args]

            def conj(env):
                unknown = False
                for p in parts:
                    r = p(env)
                    if r is False:
                        return False
                    if r is None:
                        unknown = True
                return None if unknown else True

            return conj
        if isinstance(f, Or):
            parts = [self._compile(a, bound) for a in f.args]

            def disj(env):
                unknown = False
                for p in parts:
                    r = p(env)
                    if r is True:
                        return True
                    if r is None:
                        unknown = True
                return None if unknown else False

            return disj
        if isinstance(f, (Exists, ForAll)):
            return self._quantifier(f, bound)
        raise TypeError(f"not a formula: {f!r}")

    def _quantifier(self, f, bound):
        x = f.var
        body = self._compile(f.body, bound | {x})
        want = isinstance(f, Exists)  # the verdict that a single instance decides
        pin = _pinning_equation(f) if self.solve_equations and not self.exact else None
        solver = self._solutions(x, pin) if pin is not None else None
        domain = self.domain
        exact = self.exact

        def run(env):
            saved = env.get(x, _MISSING)
            unknown = False
            try:
                if solver is not None:
                    candidates, complete = solver(env), True
                else:
                    candidates, complete = domain, exact
                for g in candidates:
                    env[x] = g
                    r = body(env)
                    if r is want:
                        return want
                    if r is None:
                        unknown = True
            finally:
                if saved is _MISSING:
                    env.pop(x, None)
                else:
                    env[x] = saved
            if unknown or not complete:
                return None
            return not want

        return run

    def _solutions(self, x: str, term: Term):
        """Closure listing every g in G with term(g, env) = 0."""
        G = self.G
        n = term.coef(x)
        rest = self._term(term.without(x))

        def solve(env):
            r = G.neg(rest(env))
            axes = []
            for i, m in enumerate(G.moduli):
                target = r[i]
                if m:
                    axes.append([y for y in range(m) if (n * y - target) % m == 0])
                elif G.divisible:
                    q = Fraction(target) / n
                    axes.append([int(q) if q.denominator == 1 else q])
                elif target % n == 0:
                    axes.append([target // n])
                else:
                    return []
            return [tuple(t) for t in itertools.product(*axes)]

        return solve


_MISSING = object()


def _pinning_equation(f) -> Term | None:
    """A term P with x in P such that the quantified body forces P = 0
    (EX) or holds whenever P != 0 (ALL)."""
    x = f.var
    body = f.body
    if isinstance(f, Exists):
        items = body.args if isinstance(body, And) else (body,)
        for c in items:
            if isinstance(c, IsZero) and c.term.coef(x):
                return c.term
    else:
        items = body.args if isinstance(body, Or) else (body,)
        for c in items:
            if isinstance(c, Not) and isinstance(c.arg, IsZero) and c.arg.term.coef(x):
                return c.arg.term
    return None


def evaluate(
    G: GroupSpec,
    f: Formula,
    assignment: dict | None = None,
    w: Window | None = None,
    solve_equations: bool = False,
) -> Truth3:
    """Truth value of f in G under the assignment (variables to elements)."""
    return Evaluator(G, w, solve_equations).truth(f, assignment)


def witness(G: GroupSpec, f: Exists, assignment: dict | None = None, w: Window | None = None):
    """First window element satisfying the body of an existential, or None."""
    ev = Evaluator(G, w)
    env = dict(assignment or {})
    for g in ev.domain:
        env[f.var] = g
        if ev.value(f.body, env) is True:
            return g
    return None


def counterexample(G: GroupSpec, f: ForAll, assignment: dict | None = None, w: Window | None = None):
    ev = Evaluator(G, w)
    env = dict(assignment or {})
    for g in ev.domain:
        env[f.var] = g
        if ev.value(f.body, env) is False:
            return g
    return None


def assignments(G: GroupSpec, names, w: Window | None = None):
    """All assignments of window elements to the given names, in order."""
    names = sorted_names(names)
    dom = G.elements(None if G.is_finite else (w or DEFAULT_WINDOW))
    for combo in itertools.product(dom, repeat=len(names)):
        yield dict(zip(names, combo))
