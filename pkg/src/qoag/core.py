"""Compatibility axioms, element classification and the structure layers."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    NotASubgroup,
    QuotientConditionViolated,
    StructureViolation,
    UnsupportedSpec,
)
from .groups import (
    INF,
    Classification,
    CompareResult,
    GroupSpec,
    Table,
    Window,
    normalize_subgroup,
    quotient_spec,
    render_element,
    sub_contains,
)

DEFAULT_MULT_BOUND = 16


def compare(G: GroupSpec, g, h) -> CompareResult:
    return G.compare(G.element(g), G.element(h))


def classify(G: GroupSpec, g) -> Classification:
    return G.classify(G.element(g))


def domain(G: GroupSpec, w: Window | None) -> list:
    """The enumeration domain: the whole group if finite, else the window."""
    if G.is_finite:
        return G.elements()
    if w is None:
        raise UnsupportedSpec(f"{G.name or 'group'} is infinite; a window is required")
    return G.elements(w)


def verdict_label(G: GroupSpec, w: Window | None) -> str:
    if G.is_finite:
        return "proved (exhaustive)"
    return f"window-verified up to N={w.bound}"


# ---------------------------------------------------------------------------
# violation reports


@dataclass(frozen=True)
class ViolationReport:
    axiom: str
    witness: tuple
    rendering: str
    group: GroupSpec | None = field(default=None, compare=False, repr=False)
    replay: Callable | None = field(default=None, compare=False, repr=False)

    def reproduces(self) -> bool:
        """Re-evaluate the axiom instance at the witness."""
        if self.replay is not None:
            return bool(self.replay())
        G = self.group
        ax = self.axiom
        if ax == "Q1":
            (x,) = self.witness
            return any(x) and G.equiv(x, G.zero)
        if ax == "Q2":
            x, y, z = self.witness
            return G.le(x, y) and not G.equiv(y, z) and not G.le(G.add(x, z), G.add(y, z))
        if ax.startswith("VM"):
            n = int(ax[2:])
            (g,) = self.witness
            return G.le(G.neg(g), g) and not G.le(g, G.scale(n, g))
        raise ValueError(f"cannot replay axiom {ax}")

    def to_json(self) -> dict:
        from .groups import _jsonable

        return {"axiom": self.axiom, "witness": _jsonable([list(g) for g in self.witness]), "rendering": self.rendering}


def _r(g) -> str:
    return render_element(g)


# ---------------------------------------------------------------------------
# rank tables for vectorized checks


def rank_keys(keys: Sequence) -> dict:
    return {k: i for i, k in enumerate(sorted(set(keys)))}


def check_q1(G: GroupSpec, w: Window | None = None) -> ViolationReport | None:
    z = G.key(G.zero)
    for x in domain(G, w):
        if any(x) and G.key(x) == z:
            return ViolationReport("Q1", (x,), f"(Q1) fails: {_r(x)} ~ 0 but {_r(x)} != 0", G)
    return None


def _sum_ranks(G: GroupSpec, W: list):
    keys = [G.key(x) for x in W]
    sums = [[G.key(G.add(x, z)) for z in W] for x in W]
    rk = rank_keys(keys + [k for row in sums for k in row])
    R = np.array([rk[k] for k in keys], dtype=np.int64)
    S = np.array([[rk[k] for k in row] for row in sums], dtype=np.int64)
    return R, S


def check_q2(G: GroupSpec, w: Window | None = None) -> ViolationReport | None:
    """First triple (x, y, z), in window order, with x <~ y, y !~ z and
    x + z not <~ y + z."""
    W = domain(G, w)
    R, S = _sum_ranks(G, W)
    not_equiv = R[:, None] != R[None, :]
    for i in range(len(W)):
        bad = (R[i] <= R)[:, None] & not_equiv & (S[i][None, :] > S)
        if bad.any():
            j, k = divmod(int(np.argmax(bad)), len(W))
            x, y, z = W[i], W[j], W[k]
            text = (
                f"(Q2) fails: x={_r(x)} <~ y={_r(y)}, y !~ z={_r(z)}, "
                f"but x+z={_r(G.add(x, z))} >- y+z={_r(G.add(y, z))}"
            )
            return ViolationReport("Q2", (x, y, z), text, G)
    return None


def check_vm(G: GroupSpec, n: int, w: Window | None = None) -> ViolationReport | None:
    if n < 1:
        raise ValueError("VM_n needs n >= 1")
    for g in domain(G, w):
        if G.le(G.neg(g), g) and not G.le(g, G.scale(n, g)):
            text = f"(VM{n}) fails: -g <~ g for g={_r(g)} but g is not <~ {n}g={_r(G.scale(n, g))}"
            return ViolationReport(f"VM{n}", (g,), text, G)
    return None


def is_compatible(G: GroupSpec, w: Window | None = None) -> bool:
    return check_q1(G, w) is None and check_q2(G, w) is None


# ---------------------------------------------------------------------------
# coordinate subgroups on windows


def recognize_subgroup(G: GroupSpec, members, w: Window | None = None) -> tuple | None:
    """Find a coordinate subgroup whose window trace is exactly `members`."""
    mem = set(members)
    sub = []
    for i, n in enumerate(G.moduli):
        vals = [g[i] for g in mem]
        if n == 0:
            if G.divisible:
                sub.append(0 if all(v == 0 for v in vals) else 1)
            else:
                sub.append(math.gcd(*[abs(v) for v in vals]))
        else:
            sub.append(math.gcd(n, *vals))
    sub = normalize_subgroup(G.moduli, G.divisible, sub)
    trace = {g for g in domain(G, w) if sub_contains(G.moduli, sub, g)}
    return sub if trace == mem else None


def subgroup_members(G: GroupSpec, sub, w: Window | None = None) -> list:
    sub = normalize_subgroup(G.moduli, G.divisible, sub)
    return [g for g in domain(G, w) if sub_contains(G.moduli, sub, g)]


def is_direct_factor(G: GroupSpec, sub) -> bool:
    """A coordinate subgroup is a coordinate direct factor when every
    coordinate is either fully kept or fully killed."""
    sub = normalize_subgroup(G.moduli, G.divisible, sub)
    return all((m == 1) or (m == (n or 0)) for n, m in zip(G.moduli, sub))


# ---------------------------------------------------------------------------
# the ordered part


@dataclass(frozen=True)
class OPart:
    elements: tuple
    subgroup: tuple | None

    def __contains__(self, g):
        return g in set(self.elements)


def o_part(G: GroupSpec, w: Window | None = None) -> OPart:
    W = domain(G, w)
    S = [g for g in W if G.is_o(g)]
    Sset = set(S)
    for a in S:
        na = G.neg(a)
        if na not in Sset:
            raise StructureViolation(f"o-type set not closed under negation at {_r(a)}", "subgroup", (a,))
        for b in S:
            s = G.add(a, b)
            if s not in Sset and (G.is_finite or G.in_window(s, w)):
                raise StructureViolation(
                    f"o-type set is not a subgroup: {_r(a)} + {_r(b)} = {_r(s)} is v-type", "subgroup", (a, b)
                )
    top = max(S, key=G.key)
    for a in W:
        if a not in Sset and G.le(a, top):
            raise StructureViolation(
                f"o-type set is not an initial segment: {_r(a)} <~ {_r(top)}", "initial-segment", (a, top)
            )
    return OPart(tuple(S), recognize_subgroup(G, S, w))


@dataclass(frozen=True)
class ValuationData:
    chain: tuple  # finite values in increasing order, gamma0 last
    gamma0: int
    values: dict

    def __call__(self, g):
        return self.values[g]


def extract_valuation(G: GroupSpec, w: Window | None = None) -> ValuationData:
    """v = class of g on the valued part, gamma0 on the o-part, INF at 0.

    Larger values sit lower in the quasi-order."""
    op = set(o_part(G, w).elements)
    W = domain(G, w)
    vkeys = sorted({G.key(g) for g in W if g not in op}, reverse=True)
    index = {k: i for i, k in enumerate(vkeys)}
    gamma0 = len(vkeys)
    values = {}
    for g in W:
        if not any(g):
            values[g] = INF
        elif g in op:
            values[g] = gamma0
        else:
            values[g] = index[G.key(g)]
    for g in W:
        for h in W:
            s = G.add(g, h)
            if s in values and values[s] < min(values[g], values[h]):
                raise StructureViolation(
                    f"ultrametric inequality fails at {_r(g)}, {_r(h)}", "ultrametric", (g, h)
                )
    return ValuationData(tuple(range(gamma0 + 1)), gamma0, values)


# ---------------------------------------------------------------------------
# convexity and quotients


@dataclass(frozen=True)
class ConvexityReport:
    convex: bool
    witness: tuple = ()
    inside_o_part: bool | None = None  # H subset of G°
    contains_o_part: bool | None = None  # G° subset of H

    def __bool__(self):
        return self.convex


def is_convex(G: GroupSpec, sub, w: Window | None = None) -> ConvexityReport:
    sub = normalize_subgroup(G.moduli, G.divisible, sub)
    W = domain(G, w)
    H = [g for g in W if sub_contains(G.moduli, sub, g)]
    if not H or G.zero not in H:
        raise NotASubgroup("subgroup trace on the window is empty")
    lo = min(H, key=G.key)
    hi = max(H, key=G.key)
    for a in W:
        if not sub_contains(G.moduli, sub, a) and G.le(lo, a) and G.le(a, hi):
            return ConvexityReport(False, (lo, a, hi))
    Hs = set(H)
    ops = {g for g in W if G.is_o(g)}
    return ConvexityReport(True, (), Hs <= ops, ops <= Hs)


def check_quotient_condition(G: GroupSpec, sub, w: Window | None = None):
    """(g1 - g2 not in H and g1 <~ g2) implies g1 + h1 <~ g2 + h2, on the
    window.  Returns the first witness (g1, g2, h1, h2) or None."""
    W = domain(G, w)
    H = [g for g in W if sub_contains(G.moduli, sub, g)]
    shifted = [[G.key(G.add(g, h)) for h in H] for g in W]
    base = [G.key(g) for g in W]
    rk = rank_keys(base + [k for row in shifted for k in row])
    K = np.array([[rk[k] for k in row] for row in shifted], dtype=np.int64)
    B = np.array([rk[k] for k in base], dtype=np.int64)
    hi_idx, lo_idx = K.argmax(axis=1), K.argmin(axis=1)
    hi, lo = K.max(axis=1), K.min(axis=1)
    from .groups import quotient_layout

    layout = quotient_layout(G.moduli, sub)
    coset = {}
    cid = np.array(
        [coset.setdefault(tuple(g[i] % m if m else g[i] for i, m in layout), len(coset)) for g in W],
        dtype=np.int64,
    )
    bad = (cid[:, None] != cid[None, :]) & (B[:, None] <= B[None, :]) & (hi[:, None] > lo[None, :])
    if bad.any():
        a, b = divmod(int(np.argmax(bad)), len(W))
        return (W[a], W[b], H[hi_idx[a]], H[lo_idx[b]])
    return None


def quotient_qo(G: GroupSpec, sub, w: Window | None = None, name: str = "") -> GroupSpec:
    sub = normalize_subgroup(G.moduli, G.divisible, sub)
    if w is None and not G.is_finite:
        w = Window(4)
    rep = is_convex(G, sub, w)
    if not rep:
        raise QuotientConditionViolated("subgroup is not convex", rep.witness)
    wit = check_quotient_condition(G, sub, w)
    if wit is not None:
        g1, g2, h1, h2 = wit
        raise QuotientConditionViolated(
            f"quotient condition fails: {_r(g1)} <~ {_r(g2)} but {_r(g1)}+{_r(h1)} >- {_r(g2)}+{_r(h2)}", wit
        )
    return quotient_spec(G, sub, name=name or f"{G.name or 'G'}/H")


# ---------------------------------------------------------------------------
# archimedean coarsening


@dataclass
class ArchData:
    group: GroupSpec
    window: Window
    mult_bound: int
    elements: list
    pre: np.ndarray  # pre[i, j]: elements[i] <~' elements[j]
    star: np.ndarray  # transitive closure
    rank: dict  # element -> class index, increasing along <~*
    vstar: dict  # element -> value, INF at 0, larger = lower

    def index(self, g) -> int:
        return self._index[g]

    def __post_init__(self):
        self._index = {g: i for i, g in enumerate(self.elements)}

    def le_pre(self, g, h) -> bool:
        return bool(self.pre[self._index[g], self._index[h]])

    def le_star(self, g, h) -> bool:
        return self.rank[g] <= self.rank[h]

    @property
    def class_count(self) -> int:
        return len(set(self.rank.values()))

    def skeleton_values(self) -> list:
        return sorted({v for v in self.vstar.values() if v != INF})


def preqo_direct(G: GroupSpec, g, h, M: int = DEFAULT_MULT_BOUND) -> bool:
    """g <~' h: some 0 <~ n g <~ m h with 0 < |n|, |m| <= M."""
    z = G.key(G.zero)
    mults = [k for k in range(-M, M + 1) if k]
    top = max(G.key(G.scale(m, h)) for m in mults)
    return any(z <= G.key(G.scale(n, g)) <= top for n in mults)


def archimedean_coarsening(G: GroupSpec, w: Window, M: int = DEFAULT_MULT_BOUND) -> ArchData:
    if isinstance(G.qo, Table) or not G.is_torsion_free or G.free_rank == 0:
        raise UnsupportedSpec("the archimedean coarsening needs a torsion-free group of positive rank")
    W = G.elements(w)
    mults = [k for k in range(-M, M + 1) if k]
    zero_key = G.key(G.zero)
    multiples = [[G.key(G.scale(n, g)) for n in mults] for g in W]
    rk = rank_keys([k for row in multiples for k in row] + [zero_key])
    z = rk[zero_key]
    lo = np.array([min(rk[k] for k in row if rk[k] >= z) for row in multiples], dtype=np.int64)
    hi = np.array([max(rk[k] for k in row) for row in multiples], dtype=np.int64)
    pre = lo[:, None] <= hi[None, :]
    star = pre.copy()
    for k in range(len(W)):
        star |= star[:, k : k + 1] & star[k : k + 1, :]
    if not (star | star.T).all():
        i, j = np.argwhere(~(star | star.T))[0]
        raise StructureViolation(f"closure is not total at {_r(W[i])}, {_r(W[j])}", "totality", (W[i], W[j]))
    below = star.sum(axis=0)  # how many elements sit <~* each element
    levels = sorted(set(below.tolist()))
    rank = {g: levels.index(int(below[i])) for i, g in enumerate(W)}
    top = len(levels) - 1
    vstar = {g: (INF if rank[g] == 0 else top - rank[g]) for g in W}
    return ArchData(G, w, M, W, pre, star, rank, vstar)


def arch_valuation_violations(A: ArchData) -> list:
    """Checks that <~* is valuational on the window; returns messages."""
    G, out = A.group, []
    W = A.elements
    idx = {g: i for i, g in enumerate(W)}
    for g in W:
        if any(g) and A.vstar[g] == INF:
            out.append(f"nonzero {_r(g)} has v* = INF")
        if A.vstar[g] != A.vstar[G.neg(g)]:
            out.append(f"v*({_r(g)}) != v*(-{_r(g)})")
        for n in range(1, A.mult_bound + 1):
            ng = G.scale(n, g)
            if ng in idx and A.vstar[ng] != A.vstar[g]:
                out.append(f"v*({n}*{_r(g)}) != v*({_r(g)})")
    for g in W:
        for h in W:
            s = G.add(g, h)
            if s in idx and A.vstar[s] < min(A.vstar[g], A.vstar[h]):
                out.append(f"ultrametric fails for v* at {_r(g)}, {_r(h)}")
    return out
