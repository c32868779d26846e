"""Recursive-descent parser for the concrete formula syntax.

See docs/grammar.md for the grammar.  `a -> b` is expanded to `!(a) | b`
and `s = t`, `s != t` to `s - t = 0` and its negation while parsing.
"""
from __future__ import annotations

import re

from ..errors import FormulaSyntaxError
from .formula import (
    FALSE,
    TRUE,
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
    ZERO,
)

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op><~|<<|->|!=|[-+*()~=!&|.,]))"
)
_KEYWORDS = {"EX", "ALL", "true", "false", "in", "Go"}
_RELOPS = {"<~", "<<", "~", "=", "!="}


class _Tokens:
    def __init__(self, src: str):
        self.src = src
        self.items = []
        pos = 0
        while True:
            while pos < len(src) and src[pos].isspace():
                pos += 1
            if pos >= len(src):
                break
            m = _TOKEN.match(src, pos)
            if not m or m.end() == pos:
                raise FormulaSyntaxError(f"unexpected character {src[pos]!r}", pos)
            kind = m.lastgroup
            text = m.group(kind)
            self.items.append((kind, text, m.start(kind)))
            pos = m.end()
        self.items.append(("eof", "", len(src)))
        self.i = 0

    def peek(self, k: int = 0):
        return self.items[min(self.i + k, len(self.items) - 1)]

    def next(self):
        tok = self.items[self.i]
        if tok[0] != "eof":
            self.i += 1
        return tok

    def at(self, text: str) -> bool:
        kind, t, _ = self.peek()
        return kind != "eof" and t == text and kind in ("op", "ident")

    def expect(self, text: str):
        tok = self.next()
        if tok[1] != text or tok[0] == "eof":
            raise FormulaSyntaxError(f"expected {text!r}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok


def parse(src: str) -> Formula:
    toks = _Tokens(src)
    f = _formula(toks)
    kind, text, pos = toks.peek()
    if kind != "eof":
        raise FormulaSyntaxError(f"unexpected {text!r}", pos)
    return f


def parse_term(src: str) -> Term:
    toks = _Tokens(src)
    t = _term(toks)
    kind, text, pos = toks.peek()
    if kind != "eof":
        raise FormulaSyntaxError(f"unexpected {text!r}", pos)
    return t


def _formula(t: _Tokens) -> Formula:
    if t.at("EX") or t.at("ALL"):
        return _quantified(t)
    left = _disjunction(t)
    if t.at("->"):
        t.next()
        right = _formula(t)
        return Or((Not(left), right))
    return left


def _quantified(t: _Tokens) -> Formula:
    q = t.next()[1]
    names = [_variable(t)]
    while t.at(","):
        t.next()
        names.append(_variable(t))
    t.expect(".")
    body = _formula(t)
    cls = Exists if q == "EX" else ForAll
    for name in reversed(names):
        body = cls(name, body)
    return body


def _variable(t: _Tokens) -> str:
    kind, text, pos = t.next()
    if kind != "ident" or text in _KEYWORDS:
        raise FormulaSyntaxError(f"expected a variable name, found {text or 'end of input'!r}", pos)
    return text


def _disjunction(t: _Tokens) -> Formula:
    args = [_conjunction(t)]
    while t.at("|"):
        t.next()
        args.append(_conjunction(t))
    return args[0] if len(args) == 1 else Or(tuple(args))


def _conjunction(t: _Tokens) -> Formula:
    args = [_unary(t)]
    while t.at("&"):
        t.next()
        args.append(_unary(t))
    return args[0] if len(args) == 1 else And(tuple(args))


def _unary(t: _Tokens) -> Formula:
    if t.at("!"):
        t.next()
        return Not(_unary(t))
    if t.at("EX") or t.at("ALL"):
        return _quantified(t)
    return _primary(t)


def _primary(t: _Tokens) -> Formula:
    kind, text, pos = t.peek()
    if kind == "ident" and text == "true":
        t.next()
        return TRUE
    if kind == "ident" and text == "false":
        t.next()
        return FALSE
    if text == "(" and kind == "op":
        # Either a parenthesized formula or a term starting with "(".
        save = t.i
        try:
            return _atom(t)
        except FormulaSyntaxError:
            t.i = save
        t.next()
        f = _formula(t)
        t.expect(")")
        return f
    return _atom(t)


def _atom(t: _Tokens) -> Formula:
    lhs = _term(t)
    kind, text, pos = t.peek()
    if kind == "ident" and text == "in":
        t.next()
        t.expect("Go")
        return InGo(lhs)
    if kind != "op" or text not in _RELOPS:
        raise FormulaSyntaxError(f"expected a relation (<~, <<, ~, =, !=, in Go), found {text or 'end of input'!r}", pos)
    t.next()
    rhs = _term(t)
    if text == "<~":
        return Le(lhs, rhs)
    if text == "<<":
        return Lt(lhs, rhs)
    if text == "~":
        return Sim(lhs, rhs)
    if text == "=":
        return IsZero(lhs - rhs)
    return Not(IsZero(lhs - rhs))


def _term(t: _Tokens) -> Term:
    sign = 1
    if t.at("-"):
        t.next()
        sign = -1
    acc = _summand(t).scale(sign)
    while t.at("+") or t.at("-"):
        sign = 1 if t.next()[1] == "+" else -1
        acc = acc + _summand(t).scale(sign)
    return acc


def _summand(t: _Tokens) -> Term:
    kind, text, pos = t.peek()
    if kind == "num":
        t.next()
        n = int(text)
        if t.at("*"):
            t.next()
            return _factor(t).scale(n)
        if n != 0:
            raise FormulaSyntaxError("integer constants other than 0 are not terms; write n*x", pos)
        return ZERO
    if t.at("-"):
        t.next()
        return -_summand(t)
    return _factor(t)


def _factor(t: _Tokens) -> Term:
    kind, text, pos = t.peek()
    if kind == "op" and text == "(":
        t.next()
        inner = _term(t)
        t.expect(")")
        return inner
    if kind == "ident" and text not in _KEYWORDS:
        t.next()
        return Term.var(text)
    if kind == "num":
        raise FormulaSyntaxError("expected a variable after '*'", pos)
    raise FormulaSyntaxError(f"expected a term, found {text or 'end of input'!r}", pos)
