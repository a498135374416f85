"""Superpotential, classifying data of bounding pairs, and coefficient extraction."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .algebra import AInftyAlgebra, Element, eval_unchecked, integral, pairing
from .coeff import CoeffElem, format_coeff, parity_split


class NotUnitPair(ValueError):
    pass


@dataclass(frozen=True)
class Superpotential:
    value: CoeffElem

    def to_json(self) -> dict:
        return {"value": self.value.to_json(), "text": format_coeff(self.value)}


def superpotential(alg: AInftyAlgebra, b: Element, check: bool = True) -> Superpotential:
    """(-1)^n Σ_k 1/(k+1) <m_k(b, ..., b), b>_F."""
    if check:
        from .deform import NotBounding
        from .mcsolve import verify_bounding_pair
        rep = verify_bounding_pair(alg, b)
        if not rep.ok:
            raise NotBounding("; ".join(rep.failures))
    total = CoeffElem.zero(alg.tower)
    if not b:
        return Superpotential(total)
    for k in range(0, alg.k_max + 1):
        mk = eval_unchecked(alg, [b] * k)
        if mk:
            total = total + pairing(alg, mk, b, use_f=True).scale(Fraction(1, k + 1))
    if alg.tower.n % 2:
        total = -total
    return Superpotential(total)


def ogw_extract(omega: Superpotential, beta, k: int, t_indices=()) -> Fraction:
    """Coefficient of T^beta in ∂_t…∂_s^k Ω at s = t = 0."""
    tw = omega.value.tower
    counts = [0] * tw.vars.count
    for i in t_indices:
        counts[i] += 1
    key = (k, tuple(beta), tuple(counts))
    c = omega.value.terms.get(key, Fraction(0))
    if not c:
        return Fraction(0)
    fact = math.factorial(k)
    for m in counts:
        fact *= math.factorial(m)
    return c * fact


def _decomposable(tower, beta, t) -> bool:
    """Is T^beta t^l a product of two non-constant allowed monomials?"""
    tt = sum(t)
    if tt >= 2:
        return True
    if tt == 1 and any(beta):
        return True
    if tt == 0:
        return tower.monoid.decompositions(beta)
    return False


def reduce_mod_odd_square(x: CoeffElem) -> CoeffElem:
    tw = x.tower
    keep = {}
    for (p, beta, t), v in x.terms.items():
        if p >= 2 and p % 2 == 0 and _decomposable(tw, beta, t):
            continue
        keep[(p, beta, t)] = v
    return CoeffElem(tw, keep, _trusted=True)


def rho(alg: AInftyAlgebra, gamma_tag, b: Element) -> tuple:
    """(tag, (∫b)^1 / s, (∫b)^0 modulo (I^odd)^2)."""
    from .mcsolve import is_unit_pair, unit_coefficient
    if not is_unit_pair(alg, b):
        raise NotUnitPair("(∫b)^1 is not s times a unit")
    even = parity_split(integral(alg, b))[0]
    return (gamma_tag, unit_coefficient(alg, b), reduce_mod_odd_square(even))
