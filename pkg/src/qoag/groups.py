"""Finitely generated abelian groups carrying a total quasi-order.

An element is a tuple of coordinates.  Each coordinate has a modulus: 0
marks a free coordinate (an integer, or a Fraction when the group is
divisible) and n >= 2 marks a cyclic coordinate reduced into range(n).

Every quasi-order variant is implemented through a *key*: a function into
a totally ordered set with g <~ h iff key(g) <= key(h).  Total preorders
are exactly the pullbacks of such keys, so totality and transitivity hold
by construction; reflexivity of the induced relation is trivial.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .errors import CoordinateMismatch, SpecError, UnsupportedSpec

INF = math.inf
Element = tuple

# Window used for load-time validation of infinite specs.
VALIDATION_WINDOW_BOUND = 3


class CompareResult(Enum):
    STRICT_BELOW = "StrictBelow"
    EQUIVALENT = "Equivalent"
    STRICT_ABOVE = "StrictAbove"


class Classification(Enum):
    ZERO = "Zero"
    OTYPE = "OType"
    VTYPE = "VType"


@dataclass(frozen=True)
class Window:
    """Free coordinates range over [-bound, bound]; rational coordinates
    additionally have denominators at most max_den."""

    bound: int
    max_den: int = 1

    def __post_init__(self):
        if self.bound < 1 or self.max_den < 1:
            raise ValueError("window bound and max_den must be positive")


def zigzag(bound: int) -> list[int]:
    """0, 1, -1, 2, -2, ... : the per-coordinate enumeration order."""
    out = [0]
    for k in range(1, bound + 1):
        out += [k, -k]
    return out


def rational_values(bound: int, max_den: int) -> list[Fraction]:
    vals = {Fraction(p, q) for q in range(1, max_den + 1) for p in range(-bound * q, bound * q + 1)}
    return sorted(vals, key=lambda x: (abs(x), x < 0))


def to_fraction(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


# ---------------------------------------------------------------------------
# coordinate subgroups


def normalize_subgroup(moduli: Sequence[int], divisible: bool, sub: Sequence[int]) -> tuple[int, ...]:
    """Validate a coordinate-subgroup description against a group layout.

    sub[i] = m describes the coordinate set m*Z (free) or mZ/nZ (cyclic of
    order n).  On cyclic coordinates 0 is accepted as an alias of n.
    """
    from .errors import NotASubgroup

    if len(sub) != len(moduli):
        raise NotASubgroup(f"subgroup description has {len(sub)} entries, group has {len(moduli)} coordinates")
    out = []
    for n, m in zip(moduli, sub):
        m = int(m)
        if m < 0:
            raise NotASubgroup("subgroup moduli must be non-negative")
        if n == 0:
            if divisible and m not in (0, 1):
                raise NotASubgroup("a rational coordinate only has the subgroups 0 and Q here")
            out.append(m)
        else:
            if m == 0:
                m = n
            if n % m:
                raise NotASubgroup(f"{m} does not divide the coordinate order {n}")
            out.append(m)
    return tuple(out)


def sub_contains(moduli, sub, g) -> bool:
    for n, m, x in zip(moduli, sub, g):
        if n == 0:
            if m == 0:
                if x != 0:
                    return False
            elif m != 1 and x % m:
                return False
        elif x % m:
            return False
    return True


def sub_layout(moduli, sub):
    """Kept coordinates of the subgroup: (parent index, scale, new modulus)."""
    out = []
    for i, (n, m) in enumerate(zip(moduli, sub)):
        if n == 0:
            if m != 0:
                out.append((i, m, 0))
        elif m != n:
            out.append((i, m, n // m))
    return out


def quotient_layout(moduli, sub):
    """Kept coordinates of the quotient: (parent index, new modulus)."""
    out = []
    for i, (n, m) in enumerate(zip(moduli, sub)):
        if n == 0:
            if m == 0:
                out.append((i, 0))
            elif m >= 2:
                out.append((i, m))
        elif m != 1:
            out.append((i, m))
    return out


# ---------------------------------------------------------------------------
# quasi-order definitions


class QoDef:
    kind = "abstract"

    def key(self, G: "GroupSpec", g: Element):
        raise NotImplementedError

    def validate(self, G: "GroupSpec") -> None:
        pass

    def payload(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Table(QoDef):
    """Finite groups only: the preorder is given by a rank function."""

    ranks: dict
    kind = "table"

    def validate(self, G):
        if not G.is_finite:
            raise SpecError("table quasi-orders need a finite group")
        elems = set(G.elements())
        if set(self.ranks) != elems:
            raise SpecError("rank table must list every group element exactly once")
        for r in self.ranks.values():
            if not isinstance(r, int) or r < 0:
                raise SpecError("ranks must be non-negative integers")

    def key(self, G, g):
        return self.ranks[g]

    def payload(self):
        return {"ranks": [[list(g), r] for g, r in sorted(self.ranks.items())]}


@dataclass(frozen=True, eq=False)
class LexOrder(QoDef):
    """Lexicographic group order on the coordinates, first coordinate leading.

    With degenerate_z2 set, the layout may contain one coordinate of order 2
    whose residues 0 < 1 are compared as integers.
    """

    degenerate_z2: bool = False
    kind = "lex"

    def validate(self, G):
        tors = G.torsion_orders
        if tors and not (self.degenerate_z2 and tors == (2,)):
            raise SpecError("lexicographic orders need a torsion-free group (or the flagged Z/2Z case)")
        if self.degenerate_z2 and tors != (2,):
            raise SpecError("degenerate_z2 is only legal with exactly one Z/2Z factor")

    def key(self, G, g):
        return g

    def payload(self):
        return {"degenerate_z2": True} if self.degenerate_z2 else {}


RULE_OPS = ("div", "ndiv")


def _rule_holds(cond, g) -> bool:
    i, op, d = cond
    x = g[i]
    hit = (x == 0) if d == 0 else (x % d == 0)
    return hit if op == "div" else not hit


@dataclass(frozen=True, eq=False)
class ValuationMap(QoDef):
    """g <~ h iff v(g) >= v(h).  Values are 0..chain-1, v(0) = INF.

    Either a table {element: value} (finite groups) or an ordered rule list
    of (value, conditions); the first rule whose conditions all hold wins.
    A condition (i, "div", d) asks d | g_i (d = 0 means g_i = 0).
    """

    chain: int
    table: dict | None = None
    rules: tuple | None = None
    kind = "valuation"

    def value(self, G, g):
        if not any(g):
            return INF
        if self.table is not None:
            return self.table[g]
        for val, conds in self.rules:
            if all(_rule_holds(c, g) for c in conds):
                return val
        raise SpecError(f"no valuation rule covers {g}")

    def key(self, G, g):
        return -self.value(G, g)

    def validate(self, G):
        if (self.table is None) == (self.rules is None):
            raise SpecError("valuation needs exactly one of a table or rules")
        if self.chain < 1:
            raise SpecError("valuation chain must be non-empty")
        if self.table is not None:
            if not G.is_finite:
                raise SpecError("valuation tables need a finite group; use rules")
            nonzero = {g for g in G.elements() if any(g)}
            if set(self.table) - {G.zero} != nonzero:
                raise SpecError("valuation table must cover every nonzero element")
            vals = [v for g, v in self.table.items() if any(g)]
        else:
            for val, conds in self.rules:
                for i, op, d in conds:
                    if op not in RULE_OPS or not 0 <= i < G.dim:
                        raise SpecError(f"bad valuation rule condition {(i, op, d)}")
            if G.divisible:
                raise UnsupportedSpec("rule valuations on rational coordinates are not supported")
            vals = [val for val, _ in self.rules]
        for v in vals:
            if not isinstance(v, int) or not 0 <= v < self.chain:
                raise SpecError(f"valuation value {v} outside the chain 0..{self.chain - 1}")
        dom = G.elements() if G.is_finite else G.elements(Window(VALIDATION_WINDOW_BOUND))
        for g in dom:
            if self.value(G, g) != self.value(G, G.neg(g)):
                raise SpecError(f"valuation is not symmetric at {g}")
        for g in dom:
            vg = self.value(G, g)
            for h in dom:
                if self.value(G, G.add(g, h)) < min(vg, self.value(G, h)):
                    raise SpecError(f"ultrametric inequality fails at {g}, {h}")

    def payload(self):
        if self.table is not None:
            return {"chain": self.chain, "values": [[list(g), v] for g, v in sorted(self.table.items()) if any(g)]}
        return {
            "chain": self.chain,
            "rules": [{"value": v, "when": [list(c) for c in conds]} for v, conds in self.rules],
        }


def _check_component_kind(spec: "GroupSpec", want: Classification, err):
    dom = spec.elements() if spec.is_finite else spec.elements(Window(VALIDATION_WINDOW_BOUND))
    for g in dom:
        c = spec.classify(g)
        if c is not Classification.ZERO and c is not want:
            raise err(f"element {g} of {spec.name or 'component'} is {c.value}")


@dataclass(frozen=True, eq=False)
class Product(QoDef):
    """o (ordered) star v (valuational) on the direct sum.

    o_positions lists which coordinates of the sum carry the o-part; the
    remaining coordinates carry v, both in their original order.
    """

    o: "GroupSpec"
    v: "GroupSpec"
    o_positions: tuple
    kind = "product"

    def layout(self):
        dim = self.o.dim + self.v.dim
        vpos = tuple(i for i in range(dim) if i not in self.o_positions)
        return self.o_positions, vpos

    def validate(self, G):
        from .errors import ComponentNotOrdered, ComponentNotValuational

        _check_component_kind(self.o, Classification.OTYPE, ComponentNotOrdered)
        _check_component_kind(self.v, Classification.VTYPE, ComponentNotValuational)

    def split(self, g):
        opos, vpos = self.layout()
        return tuple(g[i] for i in opos), tuple(g[i] for i in vpos)

    def join(self, go, gv):
        opos, vpos = self.layout()
        out = [0] * (len(opos) + len(vpos))
        for i, x in zip(opos, go):
            out[i] = x
        for i, x in zip(vpos, gv):
            out[i] = x
        return tuple(out)

    def key(self, G, g):
        go, gv = self.split(g)
        if not any(gv):
            return (0, self.o.key(go))
        return (1, self.v.key(gv))

    def payload(self):
        return {"o": self.o.to_json(), "v": self.v.to_json(), "o_positions": list(self.o_positions)}


@dataclass(frozen=True, eq=False)
class HahnComposite(QoDef):
    """Compatible Hahn product over the finite chain 0 < 1 < ... < k-1.

    The o-part is the lexicographic product of the component o-parts; the
    rest is compared through the valuational Hahn product of the quotients
    B_i / B_i°, at the least index where some block is v-type.
    """

    components: tuple
    kind = "hahn"

    def blocks(self, g):
        out, pos = [], 0
        for c in self.components:
            out.append(g[pos:pos + c.dim])
            pos += c.dim
        return out

    def offsets(self):
        out, pos = [], 0
        for c in self.components:
            out.append(pos)
            pos += c.dim
        return out

    def key(self, G, g):
        bl = self.blocks(g)
        for idx, (c, b) in enumerate(zip(self.components, bl)):
            if c.classify(b) is Classification.VTYPE:
                return (1, -idx, c.key(b))
        return (0, tuple(c.key(b) for c, b in zip(self.components, bl)))

    def payload(self):
        return {"components": [c.to_json() for c in self.components]}


@dataclass(frozen=True, eq=False)
class Extension(QoDef):
    """An ordered coordinate subgroup H below a valuational quotient G/H.

    g <~ h iff (g, h in H and g <= h lexicographically) or
    (h not in H and v(g + H) >= v(h + H)).
    """

    subgroup: tuple
    quotient: "GroupSpec"
    kind = "extension"

    def validate(self, G):
        from .errors import ComponentNotValuational

        for n, m in zip(G.moduli, self.subgroup):
            if n and m != n:
                raise SpecError("the ordered subgroup of an extension must be torsion-free")
        want = tuple(mod for _, mod in quotient_layout(G.moduli, self.subgroup))
        if want != self.quotient.moduli:
            raise SpecError(f"quotient spec has coordinates {self.quotient.moduli}, expected {want}")
        _check_component_kind(self.quotient, Classification.VTYPE, ComponentNotValuational)

    def reduce(self, G, g):
        return tuple(g[i] % m if m else g[i] for i, m in quotient_layout(G.moduli, self.subgroup))

    def key(self, G, g):
        if sub_contains(G.moduli, self.subgroup, g):
            return (0, g)
        return (1, self.quotient.key(self.reduce(G, g)))

    def payload(self):
        return {"subgroup": list(self.subgroup), "quotient": self.quotient.to_json()}


@dataclass(frozen=True, eq=False)
class Subgroup(QoDef):
    """Restriction of the parent quasi-order to a coordinate subgroup."""

    parent: "GroupSpec"
    subgroup: tuple
    kind = "subgroup"

    def embed(self, s):
        P = self.parent
        out = [0] * P.dim
        for (i, scale, _), x in zip(sub_layout(P.moduli, self.subgroup), s):
            n = P.moduli[i]
            out[i] = (scale * x) % n if n else scale * x
        return tuple(out)

    def restrict(self, g):
        P = self.parent
        out = []
        for i, scale, newmod in sub_layout(P.moduli, self.subgroup):
            if newmod:
                out.append((g[i] // scale) % newmod)
            else:
                out.append(g[i] if scale == 1 else g[i] // scale)
        return tuple(out)

    def key(self, G, g):
        return self.parent.key(self.embed(g))

    def payload(self):
        return {"parent": self.parent.to_json(), "subgroup": list(self.subgroup)}


@dataclass(frozen=True, eq=False)
class Quotient(QoDef):
    """Quotient by a convex coordinate subgroup.

    Cosets are represented by canonical lifts; on distinct cosets the
    quotient relation is the parent relation between the lifts.
    """

    parent: "GroupSpec"
    subgroup: tuple
    kind = "quotient"

    def reduce(self, g):
        return tuple(g[i] % m if m else g[i] for i, m in quotient_layout(self.parent.moduli, self.subgroup))

    def lift(self, c):
        out = [0] * self.parent.dim
        for (i, _), x in zip(quotient_layout(self.parent.moduli, self.subgroup), c):
            out[i] = x
        return tuple(out)

    def key(self, G, c):
        return self.parent.key(self.lift(c))

    def payload(self):
        return {"parent": self.parent.to_json(), "subgroup": list(self.subgroup)}


# ---------------------------------------------------------------------------
# the group spec


@dataclass(frozen=True, eq=False)
class GroupSpec:
    moduli: tuple
    qo: QoDef
    divisible: bool = False
    name: str = ""
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "moduli", tuple(int(n) for n in self.moduli))
        for n in self.moduli:
            if n != 0 and n < 2:
                raise SpecError(f"coordinate modulus {n} is neither free (0) nor >= 2")
        if self.divisible and 0 not in self.moduli:
            raise SpecError("a divisible group needs a free coordinate")
        self.qo.validate(self)

    def __repr__(self):
        return f"GroupSpec({self.name or self.qo.kind}, moduli={self.moduli})"

    # -- shape ---------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.moduli)

    @property
    def free_rank(self) -> int:
        return sum(1 for n in self.moduli if n == 0)

    @property
    def torsion_orders(self) -> tuple:
        return tuple(n for n in self.moduli if n)

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_torsion_free(self) -> bool:
        return not self.torsion_orders

    @property
    def order(self) -> int | None:
        return math.prod(self.moduli) if self.is_finite else None

    # -- arithmetic ----------------------------------------------------
    @property
    def zero(self) -> Element:
        return (0,) * self.dim

    def element(self, g: Iterable) -> Element:
        g = tuple(g)
        if len(g) != self.dim:
            raise CoordinateMismatch(f"element {g} has {len(g)} coordinates, {self.name or 'group'} has {self.dim}")
        out = []
        for x, n in zip(g, self.moduli):
            if n:
                out.append(int(x) % n)
            elif self.divisible:
                q = to_fraction(x)
                out.append(int(q) if q.denominator == 1 else q)
            else:
                if isinstance(x, Fraction) and x.denominator != 1 or isinstance(x, str):
                    raise CoordinateMismatch(f"non-integral coordinate {x!r} in a Z coordinate")
                if isinstance(x, float) and not x.is_integer():
                    raise CoordinateMismatch(f"non-integral coordinate {x!r} in a Z coordinate")
                out.append(int(x))
        return tuple(out)

    def add(self, g, h) -> Element:
        return tuple((a + b) % n if n else a + b for a, b, n in zip(g, h, self.moduli))

    def neg(self, g) -> Element:
        return tuple((-a) % n if n else -a for a, n in zip(g, self.moduli))

    def sub(self, g, h) -> Element:
        return tuple((a - b) % n if n else a - b for a, b, n in zip(g, h, self.moduli))

    def scale(self, k: int, g) -> Element:
        return tuple((k * a) % n if n else k * a for a, n in zip(g, self.moduli))

    def is_zero(self, g) -> bool:
        return not any(g)

    # -- enumeration ---------------------------------------------------
    def coordinate_values(self, i: int, window: Window | None):
        n = self.moduli[i]
        if n:
            return list(range(n))
        if window is None:
            raise UnsupportedSpec(f"{self.name or 'group'} is infinite; a window is required")
        if self.divisible:
            return [int(q) if q.denominator == 1 else q for q in rational_values(window.bound, window.max_den)]
        return zigzag(window.bound)

    def elements(self, window: Window | None = None) -> list:
        """Window elements in lexicographic order of the per-coordinate
        enumeration (0, 1, -1, 2, -2, ... on free coordinates)."""
        ck = ("elements", None if self.is_finite else window)
        if ck not in self._cache:
            axes = [self.coordinate_values(i, window) for i in range(self.dim)]
            self._cache[ck] = [tuple(t) for t in itertools.product(*axes)]
        return self._cache[ck]

    def in_window(self, g, window: Window) -> bool:
        for x, n in zip(g, self.moduli):
            if n == 0:
                if abs(x) > window.bound:
                    return False
                if isinstance(x, Fraction) and x.denominator > window.max_den:
                    return False
        return True

    # -- the quasi-order -------------------------------------------------
    def key(self, g):
        cache = self._cache.setdefault("key", {})
        k = cache.get(g)
        if k is None:
            k = self.qo.key(self, g)
            cache[g] = k
        return k

    def le(self, g, h) -> bool:
        return self.key(g) <= self.key(h)

    def lt(self, g, h) -> bool:
        return self.key(g) < self.key(h)

    def equiv(self, g, h) -> bool:
        return self.key(g) == self.key(h)

    def compare(self, g, h) -> CompareResult:
        kg, kh = self.key(g), self.key(h)
        if kg < kh:
            return CompareResult.STRICT_BELOW
        if kg == kh:
            return CompareResult.EQUIVALENT
        return CompareResult.STRICT_ABOVE

    def classify(self, g) -> Classification:
        if not any(g):
            return Classification.ZERO
        if self.key(g) == self.key(self.neg(g)):
            return Classification.VTYPE
        return Classification.OTYPE

    def is_o(self, g) -> bool:
        """Membership in G° (o-type elements together with 0)."""
        return self.classify(g) is not Classification.VTYPE

    # -- serialization -------------------------------------------------
    def to_json(self) -> dict:
        doc: dict[str, Any] = {"free_rank": self.free_rank, "torsion_orders": list(self.torsion_orders)}
        default = tuple([0] * self.free_rank + list(self.torsion_orders))
        if self.moduli != default:
            doc["coordinates"] = list(self.moduli)
        if self.divisible:
            doc["divisible"] = True
        if self.name:
            doc["name"] = self.name
        doc["qo"] = {"kind": self.qo.kind, **self.qo.payload()}
        return _jsonable(doc)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    return x


def render_element(g) -> str:
    parts = [str(x) for x in g]
    return "(" + ",".join(parts) + ")"


# ---------------------------------------------------------------------------
# builders


def derived_moduli(qo: QoDef) -> tuple | None:
    if isinstance(qo, Product):
        out = [None] * (qo.o.dim + qo.v.dim)
        opos, vpos = qo.layout()
        for i, n in zip(opos, qo.o.moduli):
            out[i] = n
        for i, n in zip(vpos, qo.v.moduli):
            out[i] = n
        return tuple(out)
    if isinstance(qo, HahnComposite):
        return tuple(n for c in qo.components for n in c.moduli)
    if isinstance(qo, Subgroup):
        return tuple(mod for _, _, mod in sub_layout(qo.parent.moduli, qo.subgroup))
    if isinstance(qo, Quotient):
        return tuple(mod for _, mod in quotient_layout(qo.parent.moduli, qo.subgroup))
    return None


def derived_divisible(qo: QoDef) -> bool | None:
    if isinstance(qo, Product):
        return _merge_divisible([qo.o, qo.v])
    if isinstance(qo, HahnComposite):
        return _merge_divisible(qo.components)
    if isinstance(qo, Subgroup):
        return qo.parent.divisible and any(n == 0 for n in derived_moduli(qo))
    if isinstance(qo, Quotient):
        return qo.parent.divisible and any(n == 0 for n in derived_moduli(qo))
    return None


def _merge_divisible(parts) -> bool:
    kinds = {p.divisible for p in parts if p.free_rank}
    if len(kinds) > 1:
        raise UnsupportedSpec("mixing rational and integer free coordinates is not supported")
    return kinds.pop() if kinds else False


def make_spec(qo: QoDef, moduli=None, divisible=None, name: str = "") -> GroupSpec:
    """Build a spec, deriving the layout for composite quasi-orders."""
    dm = derived_moduli(qo)
    if dm is not None:
        if moduli is not None and tuple(moduli) != dm:
            raise SpecError(f"declared coordinates {tuple(moduli)} differ from derived {dm}")
        moduli = dm
        dd = derived_divisible(qo)
        if divisible is not None and bool(divisible) != dd:
            raise SpecError("declared divisibility differs from the components")
        divisible = dd
    if moduli is None:
        raise SpecError("coordinates are required for this quasi-order kind")
    return GroupSpec(tuple(moduli), qo, bool(divisible), name)


def subgroup_spec(G: GroupSpec, sub, name: str = "") -> GroupSpec:
    sub = normalize_subgroup(G.moduli, G.divisible, sub)
    return make_spec(Subgroup(G, sub), name=name)


def quotient_spec(G: GroupSpec, sub, name: str = "") -> GroupSpec:
    sub = normalize_subgroup(G.moduli, G.divisible, sub)
    return make_spec(Quotient(G, sub), name=name)


# ---------------------------------------------------------------------------
# JSON loading

_TOP_FIELDS = {"free_rank", "torsion_orders", "coordinates", "torsion_first", "divisible", "name", "qo"}
_QO_FIELDS = {
    "table": {"ranks"},
    "lex": {"degenerate_z2"},
    "valuation": {"chain", "values", "rules"},
    "product": {"o", "v", "o_positions"},
    "hahn": {"components"},
    "extension": {"subgroup", "quotient"},
    "subgroup": {"parent", "subgroup"},
    "quotient": {"parent", "subgroup"},
}


def _layout_from_doc(doc) -> tuple:
    r = doc["free_rank"]
    tors = list(doc.get("torsion_orders", []))
    if not isinstance(r, int) or r < 0:
        raise SpecError("free_rank must be a non-negative integer")
    for n in tors:
        if not isinstance(n, int) or n < 2:
            raise SpecError("torsion orders must be integers >= 2")
    if "coordinates" in doc:
        coords = tuple(doc["coordinates"])
        if sorted(coords) != sorted([0] * r + tors):
            raise SpecError("coordinates disagree with free_rank/torsion_orders")
        return coords
    if doc.get("torsion_first"):
        return tuple(tors + [0] * r)
    return tuple([0] * r + tors)


def from_json(doc: dict) -> GroupSpec:
    if not isinstance(doc, dict):
        raise SpecError("a group spec must be a JSON object")
    unknown = set(doc) - _TOP_FIELDS
    if unknown:
        raise SpecError(f"unknown fields {sorted(unknown)}")
    for req in ("free_rank", "qo"):
        if req not in doc:
            raise SpecError(f"missing field {req!r}")
    moduli = _layout_from_doc(doc)
    divisible = bool(doc.get("divisible", False))
    q = doc["qo"]
    if not isinstance(q, dict) or "kind" not in q:
        raise SpecError("qo must be an object with a kind")
    kind = q["kind"]
    if kind not in _QO_FIELDS:
        raise SpecError(f"unknown qo kind {kind!r}")
    unknown = set(q) - _QO_FIELDS[kind] - {"kind"}
    if unknown:
        raise SpecError(f"unknown fields {sorted(unknown)} in qo of kind {kind}")

    def elem(c):
        if len(c) != len(moduli):
            raise CoordinateMismatch(f"element {c} does not match the {len(moduli)} coordinates")
        out = []
        for x, n in zip(c, moduli):
            if n:
                out.append(int(x) % n)
            elif divisible:
                f = to_fraction(x)
                out.append(int(f) if f.denominator == 1 else f)
            else:
                out.append(int(x))
        return tuple(out)

    name = doc.get("name", "")
    if kind == "table":
        ranks = {elem(c): r for c, r in q["ranks"]}
        return GroupSpec(moduli, Table(ranks), divisible, name)
    if kind == "lex":
        return GroupSpec(moduli, LexOrder(bool(q.get("degenerate_z2", False))), divisible, name)
    if kind == "valuation":
        chain = q.get("chain")
        if "values" in q:
            table = {elem(c): v for c, v in q["values"]}
            table[tuple([0] * len(moduli))] = INF
            return GroupSpec(moduli, ValuationMap(chain, table=table), divisible, name)
        if "rules" not in q:
            raise SpecError("valuation needs values or rules")
        rules = []
        for r in q["rules"]:
            if set(r) - {"value", "when"}:
                raise SpecError("valuation rules have fields value and when")
            rules.append((r["value"], tuple((int(i), str(op), int(d)) for i, op, d in r.get("when", []))))
        return GroupSpec(moduli, ValuationMap(chain, rules=tuple(rules)), divisible, name)
    if kind == "product":
        o, v = from_json(q["o"]), from_json(q["v"])
        opos = tuple(q.get("o_positions", range(o.dim)))
        return _declared(make_spec(Product(o, v, opos), name=name), moduli, divisible)
    if kind == "hahn":
        comps = tuple(from_json(c) for c in q["components"])
        if not comps:
            raise SpecError("a Hahn product needs at least one component")
        return _declared(make_spec(HahnComposite(comps), name=name), moduli, divisible)
    if kind == "extension":
        sub = normalize_subgroup(moduli, divisible, q["subgroup"])
        return GroupSpec(moduli, Extension(sub, from_json(q["quotient"])), divisible, name)
    parent = from_json(q["parent"])
    sub = normalize_subgroup(parent.moduli, parent.divisible, q["subgroup"])
    cls = Subgroup if kind == "subgroup" else Quotient
    return _declared(make_spec(cls(parent, sub), name=name), moduli, divisible)


def _declared(G: GroupSpec, moduli, divisible) -> GroupSpec:
    if G.moduli != tuple(moduli):
        raise SpecError(f"declared coordinates {tuple(moduli)} differ from the derived layout {G.moduli}")
    if G.divisible != divisible:
        raise SpecError("declared divisibility differs from the derived one")
    return G


def load_spec(path) -> GroupSpec:
    import json

    with open(path, encoding="utf-8") as fh:
        return from_json(json.load(fh))


def save_spec(G: GroupSpec, path) -> None:
    import json

    with open(path, "w", encoding="utf-8") as fh:
        json.dump(G.to_json(), fh, indent=2, sort_keys=False)
        fh.write("\n")
