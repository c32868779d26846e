"""Constructors for the standard groups used across the package and tests."""
from __future__ import annotations

from .groups import (
    Extension,
    GroupSpec,
    LexOrder,
    Product,
    Table,
    ValuationMap,
    make_spec,
    subgroup_spec,
)


def padic_value(p: int, x: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def z_order(name: str = "Z") -> GroupSpec:
    return GroupSpec((0,), LexOrder(), name=name)


def q_order(name: str = "Q") -> GroupSpec:
    return GroupSpec((0,), LexOrder(), divisible=True, name=name)


def lex_z(n: int, name: str = "") -> GroupSpec:
    return GroupSpec((0,) * n, LexOrder(), name=name or f"lex Z^{n}")


def trivial_valuation(moduli, name: str = "") -> GroupSpec:
    """Trivial valuation: every nonzero element has value 0."""
    moduli = tuple(moduli)
    if all(moduli):
        table = {g: 0 for g in _all(moduli) if any(g)}
        return GroupSpec(moduli, ValuationMap(1, table=table), name=name or _default_name(moduli, "trivial"))
    return GroupSpec(moduli, ValuationMap(1, rules=((0, ()),)), name=name or _default_name(moduli, "trivial"))


def padic(p: int, k: int, name: str = "") -> GroupSpec:
    """Z/p^kZ with the p-adic valuation; values 0..k-1."""
    n = p**k
    table = {(x,): padic_value(p, x) for x in range(1, n)}
    return GroupSpec((n,), ValuationMap(k, table=table), name=name or f"Z/{n}Z v_{p}")


def finite_table(moduli, ranks: dict, name: str = "") -> GroupSpec:
    return GroupSpec(tuple(moduli), Table(dict(ranks)), name=name)


def z2_degenerate() -> GroupSpec:
    """Z/2Z with 0 < 1, the flagged degenerate lexicographic case."""
    return GroupSpec((2,), LexOrder(degenerate_z2=True), name="z2")


def remark_counterexample() -> GroupSpec:
    """(Z/2Z) x Z with (a,b) <~ (c,d) iff (a = c and b <= d) or a < c."""
    return GroupSpec((2, 0), LexOrder(degenerate_z2=True), name="remark-counterexample")


def example_a() -> GroupSpec:
    """Z^2 with (a,b) <~ (c,d) iff c != 0 or (c = a = 0 and b <= d)."""
    quotient = trivial_valuation((0,), name="Z trivial")
    return GroupSpec((0, 0), Extension((0, 1), quotient), name="example-a")


def example_b() -> GroupSpec:
    """Z whose o-part is 5Z; every element outside 5Z is equivalent."""
    quotient = trivial_valuation((5,), name="Z/5Z trivial")
    return GroupSpec((0,), Extension((5,), quotient), name="example-b")


def preqo_nontransitive(p: int = 2) -> GroupSpec:
    """Z^2 with v(n,m) = 1 if p does not divide m, 2 if n != 0 and p | m,
    3 if n = 0 and p | m != 0.  Stored shifted down by one."""
    rules = (
        (0, ((1, "ndiv", p),)),
        (1, ((0, "ndiv", 0), (1, "div", p))),
        (2, ((0, "div", 0), (1, "div", p))),
    )
    return GroupSpec((0, 0), ValuationMap(3, rules=rules), name="preqo-nontransitive")


def five_z(name: str = "5Z") -> GroupSpec:
    return subgroup_spec(z_order(), (5,), name=name)


def q_tensor_z4() -> GroupSpec:
    return make_spec(Product(q_order(), padic(2, 2), (0,)), name="q-tensor-z4")


def notproduct_g2() -> GroupSpec:
    return make_spec(Product(five_z(), trivial_valuation((5,)), (0,)), name="notproduct-g2")


def _all(moduli):
    import itertools

    return [tuple(t) for t in itertools.product(*(range(n) for n in moduli))]


def _default_name(moduli, tag):
    parts = ["Z" if n == 0 else f"Z/{n}Z" for n in moduli]
    return "x".join(parts) + f" {tag}"


FIXTURE_BUILDERS = {
    "example-a": example_a,
    "example-b": example_b,
    "z2": z2_degenerate,
    "remark-counterexample": remark_counterexample,
    "preqo-nontransitive": preqo_nontransitive,
    "q-tensor-z4": q_tensor_z4,
    "notproduct-g2": notproduct_g2,
}


FIXTURE_NAMES = tuple(FIXTURE_BUILDERS)


def fixture_path(name: str):
    from importlib.resources import files

    return files("qoag") / "fixtures" / f"{name}.json"


def load_fixture(name: str) -> GroupSpec:
    """A shipped fixture by name, read from its JSON spec file."""
    import json

    from .groups import from_json

    if name not in FIXTURE_BUILDERS:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_NAMES)}")
    return from_json(json.loads(fixture_path(name).read_text()))


def write_fixtures(directory) -> list:
    """Regenerate the fixture JSON files from the builders."""
    from pathlib import Path

    from .groups import save_spec

    out = []
    for name, build in FIXTURE_BUILDERS.items():
        path = Path(directory) / f"{name}.json"
        save_spec(build(), path)
        out.append(path)
    return out
