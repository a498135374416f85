"""b-deformed operators, their boundary map, and convergence certificates."""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import AInftyAlgebra, Element, eval_unchecked, format_element
from .coeff import INF, CoeffElem, is_central


class BadDegree(ValueError):
    pass


class ZeroFiltration(ValueError):
    pass


class NotBounding(ValueError):
    def __init__(self, msg, component=None):
        super().__init__(msg)
        self.component = component


def compositions(total: int, parts: int, reverse: bool = False):
    """All tuples of ``parts`` non-negative integers summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    rng = range(total, -1, -1) if reverse else range(total + 1)
    for first in rng:
        for rest in compositions(total - first, parts - 1, reverse):
            yield (first,) + rest


class DeformedAlgebra:
    """The operators m_k^b(x_1..x_k) = Σ m_{k+Σl}(b^{l_0}, x_1, b^{l_1}, ..., x_k, b^{l_k})."""

    def __init__(self, alg: AInftyAlgebra, b: Element):
        if b:
            if not b.is_homogeneous() or b.degree() != 1:
                raise BadDegree(f"b must have degree 1, got degrees {sorted(b.degrees())}")
        nb = b.nu_total()
        if b and not nb > 0:
            raise ZeroFiltration("b needs positive nu_S (x) nu filtration")
        self.base = alg
        self.b = b
        self.tower = alg.tower
        self.min_increment = nb
        tw = alg.tower
        budget = tw.e_max + tw.s_max * (tw.n - 1)
        if not b:
            self.insertion_bound = 0
        else:
            self.insertion_bound = int(budget // nb)
        self._memo: dict = {}
        self._lock = threading.Lock()
        self.max_insertions_used = 0

    def zero(self) -> Element:
        return self.base.zero()

    def _raw(self, xs: list, reverse: bool = False) -> Element:
        """Direct insertion sum on arbitrary arguments."""
        alg = self.base
        k = len(xs)
        total = alg.zero()
        cap = min(self.insertion_bound, alg.k_max - k) if self.b else 0
        levels = range(cap, -1, -1) if reverse else range(cap + 1)
        for ell in levels:
            any_term = False
            for ls in compositions(ell, k + 1, reverse):
                args = [self.b] * ls[0]
                for x, l in zip(xs, ls[1:]):
                    args.append(x)
                    args.extend([self.b] * l)
                out = eval_unchecked(alg, args)
                if out:
                    any_term = True
                    total = total + out
            if any_term and ell > self.max_insertions_used:
                self.max_insertions_used = ell
        return total

    def on_keys(self, keys: tuple) -> Element:
        hit = self._memo.get(keys)
        if hit is not None:
            return hit
        xs = [Element(self.tower, self.base.basis, {key: 1}, _trusted=True) for key in keys]
        val = self._raw(xs)
        with self._lock:
            self._memo.setdefault(keys, val)
        return self._memo[keys]

    def m(self, args) -> Element:
        """m_k^b by expansion over monomial tuples (memoized per tuple).

        Only central coefficients may be pulled out of a b-deformed slot, so
        the memo is keyed by full monomials rather than by basis indices.
        """
        args = list(args)
        if not args:
            return self.on_keys(())
        acc = self.base.zero()
        for combo in itertools.product(*[tuple(a.terms.items()) for a in args]):
            c = Fraction(1)
            for _, x in combo:
                c *= x
            val = self.on_keys(tuple(key for key, _ in combo))
            if val:
                acc = acc + val.scale(c)
        return acc

    def m_direct(self, args, reverse: bool = False) -> Element:
        """Same value without the per-tuple memo; an independent enumeration order."""
        return self._raw(list(args), reverse)

    def curvature(self) -> Element:
        return self.m([])

    def m1(self, x: Element) -> Element:
        return self.m([x])

    def m2(self, x: Element, y: Element) -> Element:
        return self.m([x, y])


def deform(alg: AInftyAlgebra, b: Element) -> DeformedAlgebra:
    return DeformedAlgebra(alg, b)


def split_curvature(dalg: DeformedAlgebra, energy=None):
    """Split m_0^b (or its energy component) into (central unit coefficient, remainder)."""
    m0 = dalg.curvature()
    if energy is not None:
        m0 = m0.energy_part(energy)
    unit = dalg.base.basis.unit_index
    c = m0.component(unit)
    central = CoeffElem(dalg.tower, {k: v for k, v in c.terms.items() if k[0] % 2 == 0}, _trusted=True)
    rest = m0 - Element.from_coeffs(dalg.tower, dalg.base.basis, {unit: central})
    return central, rest


@dataclass
class DeformedBoundary:
    dalg: DeformedAlgebra
    below: object = None

    def __call__(self, x: Element) -> Element:
        return self.dalg.m1(x)


def deformed_boundary(dalg: DeformedAlgebra, below=None) -> DeformedBoundary:
    """m_1^b, after checking that m_0^b is a central multiple of e (for energies < ``below``)."""
    c, rest = split_curvature(dalg)
    if below is not None:
        rest = rest.filter(lambda k: dalg.tower.key_nu(k[1:]) < below)
    if rest:
        raise NotBounding(f"curvature has a non-central-unit part {format_element(rest)}", rest)
    return DeformedBoundary(dalg, below)


def residue_product(alg: AInftyAlgebra, x: Element, y: Element) -> Element:
    """x·y = (-1)^{|x|} m_2(x, y) on the energy-zero part."""
    out = eval_unchecked(alg, [x, y]).residue()
    return -out if x.degree() % 2 else out


def graded_bracket(alg: AInftyAlgebra, x: Element, y: Element) -> Element:
    if not x or not y:
        return alg.zero()
    xy = residue_product(alg, x, y)
    yx = residue_product(alg, y, x)
    return xy + yx if (x.degree() * y.degree()) % 2 else xy - yx


def residue_boundary(alg: AInftyAlgebra, b: Element, x: Element) -> Element:
    """Id⊗d − [b̄, x], with d the energy-zero part of m_1."""
    return eval_unchecked(alg, [x]).residue() - graded_bracket(alg, b.residue(), x)


# ----------------------------------------------------------------------------
# convergence certificates
# ----------------------------------------------------------------------------

@dataclass
class SababaReport:
    ok: bool
    h: int
    violations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"ok": self.ok, "h": self.h, "violations": list(self.violations)}


def sababa_validate(alg: AInftyAlgebra) -> SababaReport:
    tw = alg.tower
    bad = []
    for g in tw.monoid.positivity_violations():
        bad.append(f"generator {list(g)} has non-positive energy")
    h = max(alg.basis.degrees)
    if h > tw.n:
        bad.append(f"basis degree {h} exceeds n = {tw.n}")
    if min(alg.basis.degrees) < 0:
        bad.append("negative basis degree")

    def scan(where, beta, t):
        if tw.key_nu((0, beta, t)) == 0 and (any(beta) or any(t)):
            bad.append(f"{where}: zero-energy monomial T^{list(beta)} t^{list(t)} is not constant")

    for k, table in alg.ops.items():
        for tup, vals in table.items():
            for (w, beta, t), c in vals:
                scan(f"m_{k}{tuple(alg.basis.names[v] for v in tup)}", beta, t)
    for (i, j), vals in alg.pairing.items():
        for (beta, t), c in vals:
            scan(f"pairing({alg.basis.names[i]}, {alg.basis.names[j]})", beta, t)
    return SababaReport(not bad, h, bad)


@dataclass
class PseudoCompleteReport:
    ok: bool
    descending: bool
    sababa: bool
    bound: object
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"ok": self.ok, "descending": self.descending, "sababa": self.sababa,
                "bound": str(self.bound), "notes": list(self.notes)}


def pseudo_complete_certificate(alg: AInftyAlgebra) -> PseudoCompleteReport:
    """|s| <= -nu_S(s) with |s| < 0, plus sababa; reports K = e_max + (n-1) s_max."""
    tw = alg.tower
    notes = []
    descending = tw.n > 1 and tw.s_degree <= -(tw.n - 1) and tw.s_degree < 0
    if not descending:
        notes.append(f"|s| = {tw.s_degree} is not negative; nu_S is trivial")
    sab = sababa_validate(alg)
    notes.extend(sab.violations)
    bound = tw.e_max + (tw.n - 1) * tw.s_max if tw.n > 1 else INF
    return PseudoCompleteReport(descending and sab.ok, descending, sab.ok, bound, notes)


def is_central_unit_multiple(alg: AInftyAlgebra, x: Element) -> bool:
    unit = alg.basis.unit_index
    if any(k[0] != unit for k in x.terms):
        return False
    return is_central(x.component(unit))
