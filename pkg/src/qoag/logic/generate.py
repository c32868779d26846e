"""Seeded random formulas for property tests and corpora."""
from __future__ import annotations

import random
from fractions import Fraction

from .formula import (
    And,
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
    quantifier_rank,
)

ALL_KINDS = ("le", "lt", "eq", "sim", "ingo")
ORDER_KINDS = ("le", "lt", "eq")


def random_term(rng: random.Random, names, max_coef: int = 2) -> Term:
    names = list(names)
    if not names or rng.random() < 0.1:
        return Term()
    coefs = [1, 1, 1, -1, -1] + ([2, -2] if max_coef >= 2 else [])
    support = rng.sample(names, rng.randint(1, min(2, len(names))))
    return Term.of({n: rng.choice(coefs) for n in support})


def random_atom(rng: random.Random, names, kinds=ALL_KINDS, max_coef: int = 2) -> Formula:
    names = list(names)
    kind = rng.choice(kinds)
    a = random_term(rng, names, max_coef)
    if kind == "eq":
        if a.is_zero and names:
            a = Term.var(rng.choice(names))
        return IsZero(a)
    if kind == "ingo":
        return InGo(a)
    b = random_term(rng, names, max_coef)
    return {"le": Le, "lt": Lt, "sim": Sim}[kind](a, b)


def random_formula(
    rng: random.Random,
    free,
    rank: int,
    kinds=ALL_KINDS,
    depth: int = 2,
    bound_names=("y1", "y2", "y3"),
    max_coef: int = 2,
) -> Formula:
    """A formula whose free variables are among `free` and whose
    quantifier rank is at most `rank`."""

    def gen(scope, d, r):
        if not scope and r > 0:
            choice = rng.choice(["ex", "all"])
        else:
            options = ["atom"]
            if d > 0:
                options += ["not", "and", "or"]
            if r > 0:
                options += ["ex", "all", "ex", "all"]
            choice = rng.choice(options)
        if choice == "atom":
            return random_atom(rng, scope, kinds, max_coef)
        if choice == "not":
            return Not(gen(scope, d - 1, r))
        if choice in ("and", "or"):
            cls = And if choice == "and" else Or
            return cls((gen(scope, d - 1, r), gen(scope, d - 1, r)))
        fresh = [n for n in bound_names if n not in scope]
        var = fresh[0] if fresh else rng.choice(bound_names)
        cls = Exists if choice == "ex" else ForAll
        return cls(var, gen(sorted(set(scope) | {var}), d, r - 1))

    f = gen(list(free), depth, rank)
    assert quantifier_rank(f) <= rank
    return f


def formula_stream(seed: int, free, rank: int, kinds=ALL_KINDS, depth: int = 2, accept=None, max_coef: int = 2):
    """Endless deterministic stream of formulas passing `accept`."""
    rng = random.Random(seed)
    while True:
        nfree = rng.randint(0, len(free))
        f = random_formula(rng, list(free)[:nfree], rank, kinds, depth, max_coef=max_coef)
        if accept is None or accept(f):
            yield f


CORPUS_PARAMS = {"c1": (1, 1), "c2": (Fraction(-3, 2), 2)}


def cminimality_corpus(n: int = 100, seed: int = 0, rank: int = 2) -> list:
    """Distinct one-variable formulas in x with parameters c1, c2; about a
    third each of quantifier rank 0, 1 and 2."""
    rng = random.Random(seed)
    out, seen = [], set()
    while len(out) < n:
        r = len(out) % (rank + 1)
        f = random_formula(rng, ["x", "c1", "c2"], r, depth=2)
        if "x" not in free_vars(f) or quantifier_rank(f) != r or f in seen:
            continue
        seen.add(f)
        out.append(f)
    return out


def write_corpus(path, formulas, params: dict, header: str = "") -> None:
    from .formula import to_text

    lines = [f"# {header}"] if header else []
    lines.append("# params " + " ".join(f"{k}={_render_param(v)}" for k, v in params.items()))
    lines += [to_text(f) for f in formulas]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _render_param(v) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def read_corpus(path) -> tuple:
    """(formulas, params) from a corpus file; params lines look like
    '# params c1=(1,1) c2=(-3/2,2)'."""
    from .parser import parse

    formulas, params = [], {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line.startswith("# params"):
                for item in line[len("# params"):].split():
                    name, value = item.split("=")
                    params[name] = tuple(Fraction(x) for x in value.strip("()").split(","))
            elif line and not line.startswith("#"):
                formulas.append(parse(line))
    return formulas, params


def shipped_corpus_path():
    from importlib.resources import files

    return files("qoag") / "corpus" / "cminimal_q_tensor_z4.txt"
