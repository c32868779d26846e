"""Command line front end: qoag <subcommand> [options].

Exit codes: 0 success, 1 violations found, 2 input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import builders, core, crel
from .constructions import (
    compare_agreement,
    compatible_hahn_product,
    compatible_product,
    decompose,
    lex_product,
    recompose,
    val_hahn_product,
)
from .errors import NotProductForm, QoagError, StructureViolation, UnsupportedSpec
from .groups import GroupSpec, Window, _jsonable, load_spec, render_element, save_spec
from .logic.equiv import equiv_rank_k
from .logic.evaluate import Evaluator
from .logic.formula import free_vars, sorted_names, to_text
from .logic.generate import read_corpus, shipped_corpus_path
from .logic.parser import parse
from .logic.translate import fv_decompose, relativize_o, translate_v

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2
C_WINDOW_MAX = 3


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# input helpers


def load_group(ref: str) -> GroupSpec:
    """A spec file path or a shipped fixture name."""
    if ref in builders.FIXTURE_BUILDERS and not Path(ref).exists():
        return builders.load_fixture(ref)
    path = Path(ref)
    if not path.exists():
        raise InputError(f"no spec file or fixture named {ref!r} (fixtures: {', '.join(builders.FIXTURE_NAMES)})")
    try:
        return load_spec(path)
    except json.JSONDecodeError as e:
        raise InputError(f"{ref}: invalid JSON ({e})") from e


def parse_element(G: GroupSpec, text: str):
    raw = text.strip().strip("()")
    try:
        coords = [Fraction(x.strip()) for x in raw.split(",")] if raw else []
    except ValueError as e:
        raise InputError(f"cannot read element {text!r}") from e
    return G.element(coords)


def parse_assignments(G: GroupSpec, items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise InputError(f"expected name=element, got {item!r}")
        name, value = item.split("=", 1)
        out[name.strip()] = parse_element(G, value)
    return out


def window_of(args) -> Window:
    return Window(args.window, args.max_den)


def need_specs(args, n: int) -> list:
    specs = args.spec or []
    if len(specs) < n:
        raise InputError(f"this command needs {n} --spec argument(s)")
    return [load_group(s) for s in specs]


# ---------------------------------------------------------------------------
# subcommands


def cmd_check(args):
    (G,) = need_specs(args, 1)
    w = None if G.is_finite else window_of(args)
    rep = {"group": G.name, "verdict": core.verdict_label(G, w)}
    violations = []
    for name, fn in (("Q1", core.check_q1), ("Q2", core.check_q2)):
        r = fn(G, w)
        rep[name] = None if r is None else r.to_json()
        if r is not None:
            violations.append(name)
    vm = None
    for n in range(2, args.mult_bound + 1):
        r = core.check_vm(G, n, w)
        if r is not None:
            vm = r.to_json()
            break
    rep["VM"] = {"checked_up_to": args.mult_bound, "first_failure": vm}
    if not violations:
        cw = None if G.is_finite else Window(min(args.window, C_WINDOW_MAX), args.max_den)
        r = crel.check_c_axioms(crel.induce_c(G), cw, seed=args.seed)
        rep["C_axioms"] = {"window": None if cw is None else cw.bound, "violation": None if r is None else r.to_json()}
        if r is not None:
            violations.append(r.axiom)
    rep["violations"] = violations
    rep["status"] = "FAIL" if violations else "PASS"
    return rep, EXIT_VIOLATION if violations else EXIT_OK


def cmd_classify(args):
    (G,) = need_specs(args, 1)
    w = None if G.is_finite else window_of(args)
    D = core.domain(G, w)
    rep = {"group": G.name, "elements": {render_element(g): G.classify(g).value for g in D}}
    try:
        op = core.o_part(G, w)
        rep["o_part"] = {"size": len(op.elements), "subgroup": None if op.subgroup is None else list(op.subgroup)}
    except StructureViolation as e:
        rep["o_part"] = {"error": str(e)}
        return rep, EXIT_VIOLATION
    return rep, EXIT_OK


def cmd_decompose(args):
    (G,) = need_specs(args, 1)
    w = None if G.is_finite else window_of(args)
    try:
        d = decompose(G, w)
    except StructureViolation as e:
        return {"group": G.name, "status": "FAIL", "clause": e.clause, "error": str(e)}, EXIT_VIOLATION
    rep = {
        "group": G.name,
        "o_part": {"subgroup": list(d.subgroup), "moduli": list(d.o_spec.moduli)},
        "v_part": {"name": d.v_spec.name, "moduli": list(d.v_spec.moduli)},
        "product_form": d.product_form,
    }
    try:
        R = recompose(d)
        bad, examples = compare_agreement(G, R, core.domain(G, w))
        rep["recomposed"] = {"disagreements": bad, "examples": [[render_element(a), render_element(b)] for a, b in examples]}
        status = bad == 0
    except NotProductForm as e:
        rep["recomposed"] = {"error": f"NOT product-form: {e}"}
        status = True
    rep["status"] = "PASS" if status else "FAIL"
    return rep, EXIT_OK if status else EXIT_VIOLATION


def cmd_product(args):
    specs = need_specs(args, 1)
    kind = args.kind
    if kind == "lex":
        G = lex_product(specs)
    elif kind == "valhahn":
        G = val_hahn_product(specs)
    elif kind == "hahn":
        G = compatible_hahn_product(specs, w=window_of(args))
    else:
        if len(specs) != 2:
            raise InputError("a star product takes exactly two specs: the ordered part, then the valued part")
        G = compatible_product(*specs)
    if args.out:
        save_spec(G, args.out)
    return G.to_json(), EXIT_OK


def _formula(args):
    if not args.formula:
        raise InputError("a formula argument is required")
    return parse(args.formula)


def cmd_eval(args):
    (G,) = need_specs(args, 1)
    f = _formula(args)
    env = parse_assignments(G, args.param)
    missing = free_vars(f) - set(env)
    if missing:
        raise InputError(f"no value for free variable(s) {', '.join(sorted_names(missing))}; use --param name=element")
    w = None if G.is_finite else window_of(args)
    ev = Evaluator(G, w, solve_equations=args.solve_equations)
    r = ev.value(f, env)
    rep = {
        "group": G.name,
        "formula": to_text(f),
        "window": None if w is None else w.bound,
        "verdict": {True: "True", False: "False", None: "Unknown"}[r],
    }
    return rep, EXIT_OK


def cmd_translate(args):
    f = _formula(args)
    rep = {"formula": to_text(f)}
    if args.to in ("o", "all"):
        rep["relativize_o"] = to_text(relativize_o(f))
    if args.to in ("v", "all"):
        rep["translate_v"] = to_text(translate_v(f))
    if args.to in ("fv", "all"):
        fv = fv_decompose(f)
        pairs = []
        for i, (o, v) in enumerate(fv):
            if i >= args.max_pairs:
                break
            pairs.append({"o": to_text(o), "v": to_text(v)})
        n = fv.n if fv.n != float("inf") else "inf"
        rep["fv_decompose"] = {"pair_count": n, "shown": len(pairs), "pairs": pairs}
    return rep, EXIT_OK


def cmd_equiv(args):
    G1, G2 = need_specs(args, 2)
    w = window_of(args)
    r = equiv_rank_k(G1, G2, args.rank, w=w)
    rep = {"groups": [G1.name, G2.name], **r.to_json()}
    return rep, EXIT_OK


def cmd_minimal(args):
    (G,) = need_specs(args, 1)
    if args.formula:
        formulas = [parse(args.formula)]
        params = parse_assignments(G, args.param)
    else:
        path = args.corpus or shipped_corpus_path()
        formulas, raw = read_corpus(path)
        params = {k: G.element(v) for k, v in raw.items()}
        params.update(parse_assignments(G, args.param))
    w = None if G.is_finite else window_of(args)
    rep = crel.cminimality_probe(G, formulas, params, w)
    rep.pop("results")
    if args.formula:
        ds = crel.definable_set(G, formulas[0], w, params)
        rep["set"] = ds.describe()
        try:
            rep["cheeses"] = [c.to_json() for c in crel.cheese_normal_form(ds)]
        except QoagError as e:
            rep["cheeses"] = None
            rep["error"] = str(e)
        if args.format == "text" and ds.mode == "product":
            rep["sketch"] = _sketch(ds)
    code = EXIT_OK if not rep["failures"] else EXIT_VIOLATION
    return rep, code


def _sketch(ds, lo: int = -4, hi: int = 4, per_unit: int = 2) -> list:
    """One line per coset: '#' marks members of the ordered coordinate on
    a grid of step 1/per_unit."""
    grid = [Fraction(i, per_unit) for i in range(lo * per_unit, hi * per_unit + 1)]
    lines = [f"{'':8}{lo}{' ' * (len(grid) - len(str(lo)) - len(str(hi)))}{hi}"]
    for h, s in sorted(ds.cosets.items()):
        row = "".join("#" if s.contains(q) else "." for q in grid)
        lines.append(f"{render_element(h):8}{row}")
    return lines


COMMANDS = {
    "check": (cmd_check, "Q1/Q2 and VM checks plus the C-relation axioms"),
    "classify": (cmd_classify, "classify elements and summarize the o-part"),
    "decompose": (cmd_decompose, "split into ordered and valued parts and recompose"),
    "product": (cmd_product, "build a product of spec files"),
    "eval": (cmd_eval, "evaluate a formula"),
    "translate": (cmd_translate, "relativize_o, translate_v and fv_decompose"),
    "equiv": (cmd_equiv, "compare two groups on the rank-k sentence corpus"),
    "minimal": (cmd_minimal, "definable sets and swiss cheese forms"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qoag", description="Compatible quasi-ordered abelian groups.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        s = sub.add_parser(name, help=help_)
        s.add_argument("--spec", action="append", help="spec file or fixture name (repeatable)")
        s.add_argument("--window", type=_positive, default=6 if name == "decompose" else 3, help="window bound N")
        s.add_argument("--max-den", type=_positive, default=1, help="largest denominator on rational coordinates")
        s.add_argument("--mult-bound", type=_positive, default=core.DEFAULT_MULT_BOUND)
        s.add_argument("--rank", type=_positive, default=2, help="corpus quantifier rank")
        s.add_argument("--format", choices=("json", "text"), default="json")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--out", help="write the report (or spec, for product) to this file")
        if name in ("eval", "translate", "minimal"):
            s.add_argument("formula", nargs="?" if name == "minimal" else None)
        if name in ("eval", "minimal"):
            s.add_argument("--param", action="append", help="name=element, e.g. c1=(1,0)")
        if name == "eval":
            s.add_argument("--solve-equations", action="store_true", help="pin variables fixed by equations")
        if name == "translate":
            s.add_argument("--to", choices=("o", "v", "fv", "all"), default="all")
            s.add_argument("--max-pairs", type=_positive, default=16)
        if name == "product":
            s.add_argument("--kind", choices=("lex", "valhahn", "hahn", "star"), default="star")
        if name == "minimal":
            s.add_argument("--corpus", help="corpus file (default: the shipped one)")
    return p


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def render_text(rep, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(rep, dict):
        for k, v in rep.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(rep, list):
        for v in rep:
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{_scalar(v)}")
    else:
        lines.append(pad + _scalar(rep))
    return "\n".join(lines)


def _scalar(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, (dict, list)):
        return "none"
    return str(v)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fn = COMMANDS[args.command][0]
    try:
        rep, code = fn(args)
    except (InputError, OSError, ValueError) as e:
        return _fail(args, e, EXIT_INPUT)
    except QoagError as e:
        if isinstance(e, UnsupportedSpec) or type(e).__name__ in _INPUT_ERRORS:
            return _fail(args, e, EXIT_INPUT)
        return _fail(args, e, EXIT_VIOLATION)
    rep = _jsonable(rep)
    text = json.dumps(rep, indent=2) if args.format == "json" else render_text(rep)
    if args.out and args.command != "product":
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return code


def _fail(args, e: Exception, code: int) -> int:
    msg = {"error": type(e).__name__, "message": str(e)}
    if getattr(e, "position", None) is not None:
        msg["position"] = e.position
    print(json.dumps(msg) if args.format == "json" else f"error: {msg['message']}", file=sys.stderr)
    return code


_INPUT_ERRORS = {
    "SpecError",
    "CoordinateMismatch",
    "FormulaSyntaxError",
    "UnboundVariable",
    "NotOrderFragment",
    "NoMinimum",
    "ComponentNotOrdered",
    "ComponentNotValuational",
    "ComponentNotCompatible",
    "NotASubgroup",
}


if __name__ == "__main__":
    sys.exit(main())
