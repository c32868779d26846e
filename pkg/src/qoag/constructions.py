"""Products, the o/v decomposition, skeletons and Hahn checks."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    DEFAULT_MULT_BOUND,
    _sum_ranks,
    INF,
    archimedean_coarsening,
    check_q1,
    check_q2,
    domain,
    extract_valuation,
    is_direct_factor,
    o_part,
    quotient_qo,
    rank_keys,
    recognize_subgroup,
)
from .errors import (
    ComponentNotCompatible,
    ComponentNotOrdered,
    ComponentNotValuational,
    NotProductForm,
    StructureViolation,
    UnsupportedSpec,
)
from .groups import (
    Classification,
    GroupSpec,
    HahnComposite,
    Product,
    Window,
    make_spec,
    normalize_subgroup,
    render_element,
    sub_contains,
    sub_layout,
    subgroup_spec,
    VALIDATION_WINDOW_BOUND,
)

CHECK_WINDOW = Window(VALIDATION_WINDOW_BOUND)


def _all_of_kind(G: GroupSpec, want: Classification, w: Window | None) -> bool:
    return all(G.classify(g) in (Classification.ZERO, want) for g in domain(G, w or CHECK_WINDOW))


def lex_product(components, name: str = "") -> GroupSpec:
    comps = tuple(components)
    if not comps:
        raise ValueError("a product needs at least one component")
    for c in comps:
        if not _all_of_kind(c, Classification.OTYPE, None):
            raise ComponentNotOrdered(f"{c.name or c} is not an ordered group")
    return make_spec(HahnComposite(comps), name=name or "lex(" + ", ".join(c.name or "?" for c in comps) + ")")


def val_hahn_product(components, name: str = "") -> GroupSpec:
    comps = tuple(components)
    if not comps:
        raise ValueError("a product needs at least one component")
    for c in comps:
        if not _all_of_kind(c, Classification.VTYPE, None):
            raise ComponentNotValuational(f"{c.name or c} is not valuational")
    return make_spec(HahnComposite(comps), name=name or "valhahn(" + ", ".join(c.name or "?" for c in comps) + ")")


def compatible_product(o: GroupSpec, v: GroupSpec, name: str = "", o_positions=None) -> GroupSpec:
    """The star product of an ordered and a valuational group."""
    opos = tuple(range(o.dim)) if o_positions is None else tuple(o_positions)
    return make_spec(Product(o, v, opos), name=name or f"{o.name or 'o'} * {v.name or 'v'}")


def compatible_hahn_product(components, name: str = "", w: Window | None = None) -> GroupSpec:
    comps = tuple(components)
    if not comps:
        raise ValueError("a product needs at least one component")
    for c in comps:
        cw = None if c.is_finite else (w or CHECK_WINDOW)
        rep = check_q1(c, cw) or check_q2(c, cw)
        if rep is not None:
            raise ComponentNotCompatible(f"{c.name or c}: {rep.rendering}")
    return make_spec(HahnComposite(comps), name=name or "hahn(" + ", ".join(c.name or "?" for c in comps) + ")")


# ---------------------------------------------------------------------------
# decomposition


@dataclass
class Decomposition:
    group: GroupSpec
    window: Window | None
    subgroup: tuple  # coordinate description of G°
    o_spec: GroupSpec
    v_spec: GroupSpec
    valuation: object
    product_form: bool
    violations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "o_part": self.o_spec.to_json(),
            "v_part": self.v_spec.to_json(),
            "product_form": self.product_form,
            "violations": list(self.violations),
        }


def _fail(clause, msg, witness):
    raise StructureViolation(f"clause ({clause}): {msg}", clause, witness)


def decompose(G: GroupSpec, w: Window | None = None) -> Decomposition:
    W = domain(G, w)
    try:
        op = o_part(G, w)
    except StructureViolation as e:
        raise StructureViolation(f"clause (1): {e}", "1", e.witness) from e
    if op.subgroup is None:
        raise UnsupportedSpec("the o-part is not a coordinate subgroup on this window")
    sub = op.subgroup
    H = list(op.elements)
    Hset = set(H)
    # (2) the o-part is an ordered group
    for a in H:
        for b in H:
            if a != b and G.equiv(a, b):
                _fail("2", f"{render_element(a)} ~ {render_element(b)} inside the o-part", (a, b))
    R, S = _sum_ranks(G, H)
    for i in range(len(H)):
        bad = (R[i] <= R)[:, None] & (S[i][None, :] > S)
        if bad.any():
            j, k = divmod(int(np.argmax(bad)), len(H))
            _fail("2", f"order not translation invariant at {H[i]}, {H[j]}, {H[k]}", (H[i], H[j], H[k]))
    # (3') the quotient is valuational
    Q = quotient_qo(G, sub, w, name=f"{G.name or 'G'}/G°")
    for c in domain(Q, w):
        if Q.classify(c) is Classification.OTYPE:
            _fail("3'", f"coset {render_element(c)} is o-type in the quotient", (c,))
    # (4) g outside H and g - h in H imply g ~ h
    for g in W:
        if g in Hset:
            continue
        for h in W:
            if sub_contains(G.moduli, sub, G.sub(g, h)) and not G.equiv(g, h):
                _fail("4", f"{render_element(g)} - {render_element(h)} in G° but not equivalent", (g, h))
    val = extract_valuation(G, w)
    O = subgroup_spec(G, sub, name=f"{G.name or 'G'}°")
    return Decomposition(G, w, sub, O, Q, val, is_direct_factor(G, sub))


def recompose(d: Decomposition) -> GroupSpec:
    if not d.product_form:
        raise NotProductForm("the o-part is not a coordinate direct factor")
    G = d.group
    opos = tuple(i for i, m in enumerate(d.subgroup) if m == 1)
    return compatible_product(d.o_spec, d.v_spec, name=f"{G.name or 'G'} recomposed", o_positions=opos)


def compare_agreement(G1: GroupSpec, G2: GroupSpec, elements, phi=None) -> tuple[int, list]:
    """Count window pairs on which G1 and G2 (through phi) disagree."""
    phi = phi or (lambda g: g)
    img = [phi(g) for g in elements]
    k1 = [G1.key(g) for g in elements]
    k2 = [G2.key(g) for g in img]
    r1 = rank_keys(k1)
    r2 = rank_keys(k2)
    a = np.array([r1[k] for k in k1])
    b = np.array([r2[k] for k in k2])
    bad = (a[:, None] <= a[None, :]) != (b[:, None] <= b[None, :])
    idx = np.argwhere(bad)
    return int(bad.sum()), [(elements[i], elements[j]) for i, j in idx[:5]]


# ---------------------------------------------------------------------------
# skeletons


@dataclass
class Skeleton:
    chain: tuple
    components: tuple
    upper: tuple  # coordinate description of G^gamma
    lower: tuple  # coordinate description of G_gamma

    def __post_init__(self):
        if list(self.chain) != sorted(set(self.chain)):
            raise ValueError("skeleton indices must be strictly increasing")


def _sub_in_subgroup(G: GroupSpec, up, down) -> tuple:
    """Express the coordinate subgroup `down` inside the subgroup `up`."""
    out = []
    for i, scale, newmod in sub_layout(G.moduli, up):
        m = down[i]
        if newmod:
            out.append((m // scale) % newmod if m != G.moduli[i] else 0)
        elif m == 0:
            out.append(0)
        else:
            if m % scale:
                raise UnsupportedSpec("nested subgroups are not compatible coordinate-wise")
            out.append(m // scale)
    return tuple(out)


def _subquotient(G: GroupSpec, up, down, w, name):
    S = subgroup_spec(G, up, name=f"{name}^")
    inner = normalize_subgroup(S.moduli, S.divisible, _sub_in_subgroup(G, up, down))
    return S, quotient_qo(S, inner, None if S.is_finite else w, name=name), inner


def arch_skeleton(G: GroupSpec, w: Window, M: int = DEFAULT_MULT_BOUND) -> Skeleton:
    A = archimedean_coarsening(G, w, M)
    values = A.skeleton_values()
    comps, ups, downs = [], [], []
    for gamma in values:
        up_set = [g for g in A.elements if A.vstar[g] >= gamma]
        down_set = [g for g in A.elements if A.vstar[g] > gamma]
        up = recognize_subgroup(G, up_set, w)
        down = recognize_subgroup(G, down_set, w)
        if up is None or down is None:
            raise UnsupportedSpec(f"the v*-balls at {gamma} are not coordinate subgroups")
        _, B, _ = _subquotient(G, up, down, w, f"B_{gamma}")
        comps.append(B)
        ups.append(up)
        downs.append(down)
    return Skeleton(tuple(values), tuple(comps), tuple(ups), tuple(downs))


def presentation_valuation(G: GroupSpec, g) -> float:
    """Least block index carrying a nonzero coordinate (INF at 0)."""
    for idx, b in enumerate(G.qo.blocks(g)):
        if any(b):
            return idx
    return INF


def verify_hahn_embedding(G: GroupSpec, w: Window, M: int = DEFAULT_MULT_BOUND) -> dict:
    """Check that block coordinates embed G into the compatible Hahn product
    of its skeleton components.

    The skeleton valuation is v* when G is torsion-free (it must then agree
    with the least nonzero block) and the block valuation otherwise.
    """
    if not isinstance(G.qo, HahnComposite):
        raise UnsupportedSpec("only Hahn-coordinate presentations are supported")
    W = domain(G, w)
    comps = G.qo.components
    offs = G.qo.offsets()
    failures = []
    valuation_clause = None
    if G.is_torsion_free:
        A = archimedean_coarsening(G, w, M)
        order = sorted({A.vstar[g] for g in W if any(g)})
        valuation_clause = True
        for g in W:
            pv = presentation_valuation(G, g)
            expect = INF if pv == INF else (order[pv] if pv < len(order) else None)
            if len(order) != len(comps) or A.vstar[g] != expect:
                valuation_clause = False
                failures.append(f"v*({render_element(g)}) does not match its least nonzero block")
                break
    ups, downs = [], []
    for i in range(len(comps)):
        up = tuple(0 if j < offs[i] else 1 for j in range(G.dim))
        down = tuple(0 if j < offs[i] + comps[i].dim else 1 for j in range(G.dim))
        ups.append(normalize_subgroup(G.moduli, G.divisible, up))
        downs.append(normalize_subgroup(G.moduli, G.divisible, down))
    parts = [_subquotient(G, ups[i], downs[i], w, f"B_{i}") for i in range(len(comps))]
    B = [p[1] for p in parts]
    H = compatible_hahn_product(B, name=f"hahn skeleton of {G.name or 'G'}", w=w)

    def coset(i, g):
        S, Bi, _ = parts[i]
        return Bi.qo.reduce(S.qo.restrict(g))

    def block_only(i, g):
        out = [0] * G.dim
        out[offs[i]:offs[i] + comps[i].dim] = g[offs[i]:offs[i] + comps[i].dim]
        return tuple(out)

    def phi(g):
        return tuple(x for i in range(len(comps)) for x in coset(i, block_only(i, g)))

    bad, examples = compare_agreement(G, H, W, phi)
    kG = [G.key(g) for g in W]
    kH = [H.key(phi(g)) for g in W]
    rG, rH = rank_keys(kG), rank_keys(kH)
    a = np.array([rG[k] for k in kG])
    b = np.array([rH[k] for k in kH])
    preserved = bool((~(a[:, None] <= a[None, :]) | (b[:, None] <= b[None, :])).all())
    reflected = bool((~(b[:, None] <= b[None, :]) | (a[:, None] <= a[None, :])).all())
    if bad:
        failures += [f"order disagrees at {render_element(x)}, {render_element(y)}" for x, y in examples]
    coefficient = True
    for g in W:
        pv = presentation_valuation(G, g)
        if pv == INF:
            continue
        if coset(pv, g) != coset(pv, block_only(pv, g)):
            coefficient = False
            failures.append(f"coefficient of {render_element(g)} at {pv} is not its coset")
            break
    ok = preserved and reflected and coefficient and valuation_clause is not False
    return {
        "group": G.name,
        "window": w.bound,
        "pairs": len(W) ** 2,
        "components": [c.name for c in B],
        "preserved": preserved,
        "reflected": reflected,
        "coefficient_clause": coefficient,
        "valuation_clause": valuation_clause,
        "ok": ok,
        "failures": failures,
    }
