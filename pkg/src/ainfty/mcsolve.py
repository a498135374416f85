"""Energy-inductive solver for bounding cochains seeded at a multiple of the point class."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .algebra import AInftyAlgebra, Element, apply_involution, format_element, integral
from .coeff import (CoeffElem, format_coeff, is_central, nu, parity_split, phi_star)
from .deform import BadDegree, DeformedAlgebra, ZeroFiltration, split_curvature


class Obstructed(Exception):
    def __init__(self, level, energy, cls: Element, cokernel_dim: int, trace=None):
        super().__init__(f"obstructed at level {level} (energy {energy}): {format_element(cls)}")
        self.level = level
        self.energy = energy
        self.cls = cls
        self.class_dim = 1 if cls else 0
        self.cokernel_dim = cokernel_dim
        self.trace = trace or []

    def to_json(self) -> dict:
        return {"status": "obstructed", "level": self.level, "energy": str(self.energy),
                "class": self.cls.to_json(), "class_dim": self.class_dim,
                "cokernel_dim": self.cokernel_dim, "trace": self.trace}


class NoSolution(Exception):
    def __init__(self, residual: Element, cokernel_dim: int):
        super().__init__(f"no primitive; cokernel representative {format_element(residual)}")
        self.residual = residual
        self.cokernel_dim = cokernel_dim


class NotYetSolved(Exception):
    pass


class NotClosed(Exception):
    pass


class NotReal(ValueError):
    pass


# ----------------------------------------------------------------------------
# energy ladder and graded pieces
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class EnergyLadder:
    levels: tuple

    @classmethod
    def harvest(cls, alg: AInftyAlgebra, extra=()) -> "EnergyLadder":
        tw = alg.tower
        gens = set()
        for table in alg.ops.values():
            for vals in table.values():
                for (w, beta, t), c in vals:
                    gens.add(tw.key_nu((0, beta, t)))
        for vals in alg.pairing.values():
            for (beta, t), c in vals:
                gens.add(tw.key_nu((0, beta, t)))
        gens.update(extra)
        gens = sorted(g for g in gens if g > 0)
        levels = {Fraction(0)}
        frontier = [Fraction(0)]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = x + g
                    if y <= tw.e_max and y not in levels:
                        levels.add(y)
                        nxt.append(y)
            frontier = nxt
        return cls(tuple(sorted(levels)))

    def __iter__(self):
        return iter(self.levels)

    def __len__(self):
        return len(self.levels)

    def index(self, energy) -> int:
        return self.levels.index(energy)


def monomials_at(alg: AInftyAlgebra, energy, degree: int) -> list:
    """All monomials s^p T^beta t^l v of the given energy and total degree within the cutoffs."""
    tw = alg.tower
    out = []
    classes = _classes_up_to(alg, energy)
    for beta, t in classes:
        if tw.key_nu((0, beta, t)) != energy:
            continue
        for v, dv in enumerate(alg.basis.degrees):
            for p in range(tw.s_max + 1):
                key = (v, p, beta, t)
                if dv + tw.key_degree((p, beta, t)) == degree and tw.keep(key[1:]):
                    out.append(key)
    return sorted(out)


def _classes_up_to(alg: AInftyAlgebra, energy) -> list:
    tw = alg.tower
    gens = [tuple(g) for g in tw.monoid.allowed_cone if any(g) and tw.monoid.omega_of(g) > 0]
    ntv = tw.vars.count
    zb = tw.monoid.zero()
    seen = {zb}
    frontier = [zb]
    while frontier:
        nxt = []
        for b in frontier:
            for g in gens:
                c = tuple(x + y for x, y in zip(b, g))
                if tw.monoid.omega_of(c) <= energy and c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    out = []
    for beta in sorted(seen):
        rem = energy - tw.monoid.omega_of(beta)
        if rem < 0 or rem.denominator != 1:
            continue
        for t in _t_vectors(ntv, int(rem)):
            out.append((beta, t))
    return out


def _t_vectors(count: int, total: int) -> list:
    if count == 0:
        return [()] if total == 0 else []
    if count == 1:
        return [(total,)]
    return [(a,) + rest for a in range(total + 1) for rest in _t_vectors(count - 1, total - a)]


def _quotient_vec(alg: AInftyAlgebra, x: Element) -> dict:
    """Coordinates in C_{∉e}: drop central multiples of the unit."""
    unit = alg.basis.unit_index
    return {k: v for k, v in x.terms.items() if not (k[0] == unit and k[1] % 2 == 0)}


def _linear_piece(dalg: DeformedAlgebra, energy, degree: int, nonneg_filtration: bool = True):
    alg = dalg.base
    unknowns = monomials_at(alg, energy, degree)
    if energy == 0 and nonneg_filtration:
        unknowns = [k for k in unknowns if k[1] > 0]
    cols = []
    for key in unknowns:
        x = Element(alg.tower, alg.basis, {key: 1}, _trusted=True)
        cols.append(_quotient_vec(alg, dalg.m1(x).energy_part(energy)))
    return unknowns, cols


# ----------------------------------------------------------------------------
# solver steps
# ----------------------------------------------------------------------------

def obstruction_cocycle(dalg: DeformedAlgebra, energy, check_lower: bool = True) -> Element:
    """Energy component of m_0^b with its central unit part removed; checked to be closed."""
    alg = dalg.base
    m0 = dalg.curvature()
    if check_lower:
        for E in m0.energies():
            if E >= energy:
                continue
            _, rest = split_curvature(dalg, E)
            if rest:
                raise NotYetSolved(f"curvature at energy {E} is not a central unit multiple")
    _, obs = split_curvature(dalg, energy)
    obs = Element(alg.tower, alg.basis, _quotient_vec(alg, obs), _trusted=True)
    if obs:
        img = _quotient_vec(alg, dalg.m1(obs).energy_part(energy))
        if img:
            raise NotClosed(f"obstruction is not closed: {img}")
    return obs


def cokernel_dim(dalg: DeformedAlgebra, energy, degree: int = 2) -> int:
    """dim of twisted cohomology of the graded piece in the given degree (unit line removed)."""
    _, cols_in = _linear_piece(dalg, energy, degree - 1)
    keys, cols_out = _linear_piece(dalg, energy, degree, nonneg_filtration=False)
    unit = dalg.base.basis.unit_index
    idx = [i for i, k in enumerate(keys) if not (k[0] == unit and k[1] % 2 == 0)]
    closed = len(linalg.kernel([cols_out[i] for i in idx]))
    return closed - linalg.rank(cols_in)


def primitive_solve(dalg: DeformedAlgebra, target: Element, energy, rule: str = "lex") -> Element:
    """ξ of degree 1 and the given energy with m_1^b(ξ) ≡ −target in the graded piece of C_{∉e}."""
    alg = dalg.base
    goal = {k: -v for k, v in _quotient_vec(alg, target).items()}
    if not goal:
        return alg.zero()
    unknowns, cols = _linear_piece(dalg, energy, 1)
    x = linalg.solve(cols, goal, rule)
    if x is None:
        res = linalg.residual(cols, goal)
        raise NoSolution(Element(alg.tower, alg.basis, {k: -v for k, v in res.items()}, _trusted=True),
                         cokernel_dim(dalg, energy))
    return Element(alg.tower, alg.basis, {unknowns[j]: c for j, c in x.items()})


def normalize_integral(alg: AInftyAlgebra, xi: Element) -> Element:
    top = set(alg.top_indices())
    return xi.filter(lambda k: k[0] not in top)


def real_average(alg: AInftyAlgebra, x: Element) -> Element:
    return (x - apply_involution(alg, x)).scale(Fraction(1, 2))


# ----------------------------------------------------------------------------
# bounding pairs
# ----------------------------------------------------------------------------

@dataclass
class BoundingCheck:
    ok: bool
    c: CoeffElem | None
    failures: list = field(default_factory=list)
    c_at_cutoff: bool = False

    def to_json(self) -> dict:
        return {"ok": self.ok, "c": self.c.to_json() if self.c is not None else None,
                "c_text": format_coeff(self.c) if self.c is not None else None,
                "c_at_cutoff": self.c_at_cutoff, "failures": list(self.failures)}


def unit_coefficient(alg: AInftyAlgebra, b: Element):
    """(∫b)^1 / s, or None when the odd part is not s times something."""
    odd = parity_split(integral(alg, b))[1]
    terms = {}
    for (p, beta, t), v in odd.terms.items():
        terms[(p - 1, beta, t)] = v
    return CoeffElem(alg.tower, terms, _trusted=True)


def is_unit_pair(alg: AInftyAlgebra, b: Element) -> bool:
    u = unit_coefficient(alg, b)
    return u.terms.get(alg.tower.zero_key(), 0) != 0


def verify_bounding_pair(alg: AInftyAlgebra, b: Element, unit_pair: bool = False) -> BoundingCheck:
    fails = []
    try:
        dalg = DeformedAlgebra(alg, b)
    except (BadDegree, ZeroFiltration) as exc:
        return BoundingCheck(False, None, [f"{type(exc).__name__}: {exc}"])
    m0 = dalg.curvature()
    unit = alg.basis.unit_index
    off = m0.filter(lambda k: k[0] != unit)
    if off:
        fails.append(f"curvature has components off the unit: {format_element(off)}")
    c = m0.component(unit)
    if not is_central(c):
        fails.append(f"c = {format_coeff(c)} is not central")
    if c:
        if not c.is_homogeneous():
            fails.append("c is not homogeneous")
        elif c.degree() != 2:
            fails.append(f"c has degree {c.degree()}, expected 2")
        if not nu(c) > 0:
            fails.append("nu(c) must be positive")
    tw = alg.tower
    at_cut = any(k[0] == tw.s_max or tw.key_nu(k) == tw.e_max for k in c.terms)
    if unit_pair and not is_unit_pair(alg, b):
        fails.append("not a unit pair: (∫b)^1 is not s times a unit")
    return BoundingCheck(not fails, c, fails, at_cut)


@dataclass
class BoundingPairReport:
    b: Element
    c: CoeffElem
    trace: list
    rho: tuple | None
    check: BoundingCheck
    pivot: str = "lex"
    mode: str = "plain"

    def to_json(self) -> dict:
        rho = None
        if self.rho is not None:
            tag, u, ev = self.rho
            rho = {"gamma": tag, "unit_coeff": u.to_json(), "even_part": ev.to_json(),
                   "unit_coeff_text": format_coeff(u), "even_part_text": format_coeff(ev)}
        return {"status": "ok" if self.check.ok else "failed", "mode": self.mode, "pivot": self.pivot,
                "b": self.b.to_json(), "b_text": format_element(self.b), "c": self.c.to_json(),
                "c_text": format_coeff(self.c), "trace": self.trace, "rho": rho, "check": self.check.to_json()}


def solve_point_like(alg: AInftyAlgebra, a: CoeffElem, mode: str = "plain", rule: str = "lex",
                     unit_pair: bool = False) -> BoundingPairReport:
    tw = alg.tower
    if mode not in ("plain", "real"):
        raise ValueError("mode is 'plain' or 'real'")
    linalg.column_order(0, rule)
    if a and (not a.is_homogeneous() or a.degree() != 1 - tw.n):
        raise BadDegree(f"the integral must have degree {1 - tw.n}")
    if any(tw.key_nu(k) == 0 and k[0] == 0 for k in a.terms):
        raise ZeroFiltration("the integral must lie in I_S + I_R")
    if mode == "real":
        if phi_star(a) != -a:
            raise NotReal("real mode needs phi*(a) = -a")
        if not tw.real:
            raise NotReal("the model is not declared real")
    vol = alg.vol_index()
    b = Element.from_coeffs(tw, alg.basis, {vol: a})
    ladder = EnergyLadder.harvest(alg, [tw.key_nu(k) for k in a.terms])
    trace = []
    for level, E in enumerate(ladder):
        dalg = DeformedAlgebra(alg, b)
        obs = obstruction_cocycle(dalg, E)
        entry = {"level": level, "energy": str(E), "obstruction_terms": len(obs.terms),
                 "obstruction": format_element(obs)}
        if not obs:
            entry.update(primitive="0", normalized=False)
            trace.append(entry)
            continue
        if E == 0:
            raise Obstructed(level, E, obs, cokernel_dim(dalg, E), trace)
        try:
            xi = primitive_solve(dalg, obs, E, rule)
        except NoSolution as exc:
            trace.append(dict(entry, primitive=None))
            raise Obstructed(level, E, exc.residual, exc.cokernel_dim, trace) from None
        xi_n = normalize_integral(alg, xi)
        if mode == "real":
            xi_n = real_average(alg, xi_n)
        check = _quotient_vec(alg, (dalg.m1(xi_n).energy_part(E) + obs))
        if check:
            raise NotClosed("normalized primitive no longer solves the level equation")
        entry.update(primitive=format_element(xi_n), normalized=xi_n != xi)
        trace.append(entry)
        b = b + xi_n
    check = verify_bounding_pair(alg, b, unit_pair)
    from .invariants import rho as rho_of
    r = None
    if is_unit_pair(alg, b):
        r = rho_of(alg, alg.gamma_tag, b)
    return BoundingPairReport(b, check.c if check.c is not None else CoeffElem.zero(tw), trace, r, check,
                              rule, mode)
