"""Expression syntax for coefficients and elements.

    expr   := ['-'] term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := INT ['/' INT] | 's' ['^' INT] | 'T^[' INT (',' INT)* ']' | 't^[' INT (',' INT)* ']' | NAME

A NAME is a basis element; at most one per term.  ``format_element`` and
``format_coeff`` print in this syntax, so printing and parsing round-trip.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .algebra import AInftyAlgebra, Element
from .coeff import CoeffElem, TowerConfig

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<vec>[Tt]\^\[[-\d,\s]*\])|(?P<pow>s\^\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
                    r"|(?P<op>[-+*/]))")


class ParseError(ValueError):
    pass


def _tokens(text: str) -> list:
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected input at {text[pos:]!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
    return out


def _parse_terms(text: str, tower: TowerConfig, names=()) -> list:
    toks = _tokens(text)
    if not toks:
        raise ParseError("empty expression")
    terms = []
    i = 0
    sign = 1
    if toks[0] == ("op", "-"):
        sign, i = -1, 1
    elif toks[0] == ("op", "+"):
        i = 1
    zb = list(tower.monoid.zero())
    zt = [0] * tower.vars.count
    while True:
        coeff = Fraction(sign)
        p, beta, t, basis = 0, list(zb), list(zt), None
        while True:
            if i >= len(toks):
                raise ParseError("expression ends inside a term")
            kind, val = toks[i]
            i += 1
            if kind == "num":
                c = Fraction(int(val))
                if i + 1 < len(toks) and toks[i] == ("op", "/") and toks[i + 1][0] == "num":
                    if not int(toks[i + 1][1]):
                        raise ParseError("division by zero")
                    c /= int(toks[i + 1][1])
                    i += 2
                coeff *= c
            elif kind == "pow":
                p += int(val[2:])
            elif kind == "vec":
                nums = [int(x) for x in val[3:-1].split(",") if x.strip()]
                target = beta if val[0] == "T" else t
                if len(nums) != len(target):
                    raise ParseError(f"{val} has the wrong length")
                for j, x in enumerate(nums):
                    target[j] += x
            elif kind == "name":
                if val == "s":
                    p += 1
                elif val in names:
                    if basis is not None:
                        raise ParseError("two basis names in one term")
                    basis = val
                else:
                    raise ParseError(f"unknown symbol {val!r}")
            else:
                raise ParseError(f"unexpected {val!r}")
            if i < len(toks) and toks[i] == ("op", "*"):
                i += 1
                continue
            break
        terms.append((basis, (p, tuple(beta), tuple(t)), coeff))
        if i >= len(toks):
            break
        kind, val = toks[i]
        if kind != "op" or val not in "+-":
            raise ParseError(f"expected + or - before {val!r}")
        sign = 1 if val == "+" else -1
        i += 1
    return terms


def parse_coeff(text: str, tower: TowerConfig) -> CoeffElem:
    if text.strip() == "0":
        return CoeffElem.zero(tower)
    terms = _parse_terms(text, tower)
    return CoeffElem(tower, [(key, c) for _, key, c in terms])


def parse_element(text: str, alg: AInftyAlgebra) -> Element:
    if text.strip() == "0":
        return alg.zero()
    out = alg.zero()
    for basis, key, c in _parse_terms(text, alg.tower, alg.basis.names):
        if basis is None:
            raise ParseError("every term of an element needs a basis name")
        out = out + alg.vec(basis, CoeffElem(alg.tower, {key: c}))
    return out
