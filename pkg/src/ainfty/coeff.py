"""Exact coefficient tower: the Novikov-style ring R, the odd parameter s, and
the truncated product ring S ⊗ R.

A monomial is a key ``(s_pow, beta, t_exp)``; a :class:`CoeffElem` is a sparse
map from such keys to nonzero :class:`fractions.Fraction` values.  Terms whose
energy exceeds ``e_max`` or whose s-power exceeds ``s_max`` are never stored.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Iterable, Mapping

INF = math.inf

Key = tuple  # (s_pow, beta tuple, t_exp tuple)


class NonHomogeneous(ValueError):
    pass


class OddMaslov(ValueError):
    pass


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass a rational or a 'p/q' string")
    return Fraction(x)


def frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class MonoidSpec:
    """Degree monoid: energy ``omega`` and Maslov index ``mu`` on Z^rank.

    ``check=False`` skips the positivity validation; it exists only so that
    deliberately broken fixtures can be built and reported on.
    """
    rank: int
    omega: tuple
    mu: tuple
    allowed_cone: tuple
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "omega", tuple(frac(w) for w in self.omega))
        object.__setattr__(self, "mu", tuple(int(m) for m in self.mu))
        object.__setattr__(self, "allowed_cone", tuple(tuple(int(c) for c in g) for g in self.allowed_cone))
        if len(self.omega) != self.rank or len(self.mu) != self.rank:
            raise ValueError("omega and mu must have length rank")
        if any(len(g) != self.rank for g in self.allowed_cone):
            raise ValueError("cone generators must have length rank")
        if self.check:
            bad = self.positivity_violations()
            if bad:
                raise ValueError(f"Novikov positivity fails for generators {bad}")

    def positivity_violations(self) -> list:
        out = []
        for g in self.allowed_cone:
            w = self.omega_of(g)
            if w < 0 or (w == 0 and any(g)):
                out.append(g)
        return out

    def omega_of(self, beta) -> Fraction:
        return sum((w * b for w, b in zip(self.omega, beta)), Fraction(0))

    def mu_of(self, beta) -> int:
        return sum(m * b for m, b in zip(self.mu, beta))

    def zero(self) -> tuple:
        return (0,) * self.rank

    def is_allowed(self, beta) -> bool:
        return _cone_member(self, tuple(beta))

    def decompositions(self, beta) -> bool:
        """True when beta is a sum of two nonzero allowed classes."""
        beta = tuple(beta)
        for g in self.allowed_cone:
            if not any(g):
                continue
            rest = tuple(b - c for b, c in zip(beta, g))
            if any(rest) and self.is_allowed(rest):
                return True
        return False

    def to_json(self) -> dict:
        return {"rank": self.rank, "omega": [frac_str(w) for w in self.omega],
                "mu": list(self.mu), "allowed_cone": [list(g) for g in self.allowed_cone]}

    @classmethod
    def from_json(cls, d: Mapping, check: bool = True) -> "MonoidSpec":
        return cls(int(d["rank"]), tuple(frac(w) for w in d["omega"]), tuple(d["mu"]),
                   tuple(tuple(g) for g in d["allowed_cone"]), check=check)


@lru_cache(maxsize=None)
def _cone_member(monoid: MonoidSpec, beta: tuple) -> bool:
    if not any(beta):
        return True
    if monoid.omega_of(beta) < 0:
        return False
    for g in monoid.allowed_cone:
        if not any(g):
            continue
        if monoid.omega_of(g) <= 0:
            # no energy bound for this generator; only accept exact hits
            if tuple(beta) == tuple(g):
                return True
            continue
        rest = tuple(b - c for b, c in zip(beta, g))
        if monoid.omega_of(rest) >= 0 and _cone_member(monoid, rest):
            return True
    return False


@dataclass(frozen=True)
class FormalVarSpec:
    t_degrees: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "t_degrees", tuple(int(d) for d in self.t_degrees))

    @property
    def count(self) -> int:
        return len(self.t_degrees)


@dataclass(frozen=True)
class TowerConfig:
    n: int
    e_max: Fraction
    s_max: int
    monoid: MonoidSpec
    vars: FormalVarSpec = FormalVarSpec()
    real: bool = False

    def __post_init__(self):
        object.__setattr__(self, "e_max", frac(self.e_max))
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.s_max < 0:
            raise ValueError("s_max must be non-negative")
        if self.real and any(d % 2 for d in self.vars.t_degrees):
            raise ValueError("real mode requires even t-degrees")

    @property
    def s_degree(self) -> int:
        return 1 - self.n

    def r_degree(self, beta, t_exp) -> int:
        return self.monoid.mu_of(beta) + sum(a * d for a, d in zip(t_exp, self.vars.t_degrees))

    def key_degree(self, key: Key) -> int:
        p, beta, t = key
        return p * (1 - self.n) + self.r_degree(beta, t)

    def key_nu(self, key: Key) -> Fraction:
        _, beta, t = key
        return self.monoid.omega_of(beta) + sum(t)

    def keep(self, key: Key) -> bool:
        return key[0] <= self.s_max and self.key_nu(key) <= self.e_max

    def zero_key(self) -> Key:
        return (0, self.monoid.zero(), (0,) * self.vars.count)

    def with_cutoffs(self, e_max=None, s_max=None) -> "TowerConfig":
        return TowerConfig(self.n, self.e_max if e_max is None else frac(e_max),
                           self.s_max if s_max is None else int(s_max), self.monoid, self.vars, self.real)

    def to_json(self) -> dict:
        return {"n": self.n, "e_max": frac_str(self.e_max), "s_max": self.s_max,
                "monoid": self.monoid.to_json(), "t_vars": list(self.vars.t_degrees), "real": self.real}

    @classmethod
    def from_json(cls, d: Mapping) -> "TowerConfig":
        return cls(int(d["n"]), frac(d["e_max"]), int(d["s_max"]), MonoidSpec.from_json(d["monoid"]),
                   FormalVarSpec(tuple(d.get("t_vars", ()))), bool(d.get("real", False)))


def key_mul(tower: TowerConfig, a: Key, b: Key) -> tuple[int, Key]:
    """Product of two monomials: (sign, key).  The R part of ``a`` crosses s^q of ``b``."""
    p, beta, t = a
    q, beta2, t2 = b
    sign = -1 if (tower.r_degree(beta, t) * q * (1 - tower.n)) % 2 else 1
    return sign, (p + q, tuple(x + y for x, y in zip(beta, beta2)), tuple(x + y for x, y in zip(t, t2)))


class CoeffElem:
    """Element of the truncated tower S ⊗ R.  Immutable."""

    __slots__ = ("tower", "_terms")

    def __init__(self, tower: TowerConfig, terms: Mapping | Iterable = (), _trusted: bool = False):
        self.tower = tower
        if _trusted:
            self._terms = terms
            return
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for key, c in items:
            p, beta, t = key
            key = (int(p), tuple(beta), tuple(t))
            if p < 0:
                raise ValueError("negative s-power")
            if len(key[1]) != tower.monoid.rank or len(key[2]) != tower.vars.count:
                raise ValueError(f"monomial {key} does not match the tower shape")
            if any(x < 0 for x in key[2]):
                raise ValueError("negative t exponent")
            if not tower.monoid.is_allowed(key[1]):
                raise ValueError(f"class {key[1]} is outside the allowed cone")
            if not tower.keep(key):
                continue
            acc[key] = acc.get(key, Fraction(0)) + frac(c)
        self._terms = {k: v for k, v in acc.items() if v != 0}

    # constructors
    @classmethod
    def zero(cls, tower: TowerConfig) -> "CoeffElem":
        return cls(tower, {}, _trusted=True)

    @classmethod
    def scalar(cls, tower: TowerConfig, c=1) -> "CoeffElem":
        return cls(tower, {tower.zero_key(): frac(c)})

    @classmethod
    def monomial(cls, tower: TowerConfig, s_pow: int = 0, beta=None, t_exp=None, c=1) -> "CoeffElem":
        beta = tower.monoid.zero() if beta is None else tuple(beta)
        t_exp = (0,) * tower.vars.count if t_exp is None else tuple(t_exp)
        return cls(tower, {(s_pow, beta, t_exp): frac(c)})

    @property
    def terms(self) -> Mapping:
        return MappingProxyType(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CoeffElem.scalar(self.tower, other) if other else CoeffElem.zero(self.tower)
        if not isinstance(other, CoeffElem):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def _coerce(self, other) -> "CoeffElem":
        if isinstance(other, CoeffElem):
            return other
        return CoeffElem.scalar(self.tower, other)

    def __add__(self, other):
        other = self._coerce(other)
        acc = dict(self._terms)
        for k, v in other._terms.items():
            s = acc.get(k, 0) + v
            if s:
                acc[k] = s
            else:
                acc.pop(k, None)
        return CoeffElem(self.tower, acc, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return CoeffElem(self.tower, {k: -v for k, v in self._terms.items()}, _trusted=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "CoeffElem":
        c = frac(c)
        if c == 0:
            return CoeffElem.zero(self.tower)
        return CoeffElem(self.tower, {k: v * c for k, v in self._terms.items()}, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, CoeffElem):
            return NotImplemented
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __repr__(self):
        return f"CoeffElem({format_coeff(self)})"

    # gradings
    def degrees(self) -> set:
        return {self.tower.key_degree(k) for k in self._terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> int:
        ds = self.degrees()
        if len(ds) != 1:
            raise NonHomogeneous(f"element {self!r} has degrees {sorted(ds)}")
        return ds.pop()

    def to_json(self) -> list:
        return [{"s_pow": k[0], "beta": list(k[1]), "t_exp": list(k[2]), "coeff": frac_str(v)}
                for k, v in sorted(self._terms.items())]

    @classmethod
    def from_json(cls, tower: TowerConfig, data: list) -> "CoeffElem":
        return cls(tower, [((d["s_pow"], tuple(d["beta"]), tuple(d["t_exp"])), frac(d["coeff"])) for d in data])


def mul(x: CoeffElem, y: CoeffElem) -> CoeffElem:
    tower = x.tower
    acc: dict = {}
    for a, u in x._terms.items():
        for b, v in y._terms.items():
            sign, k = key_mul(tower, a, b)
            if not tower.keep(k):
                continue
            s = acc.get(k, 0) + sign * u * v
            if s:
                acc[k] = s
            else:
                acc.pop(k, None)
    return CoeffElem(tower, acc, _trusted=True)


def nu(x: CoeffElem):
    if not x._terms:
        return INF
    return min(x.tower.key_nu(k) for k in x._terms)


def nu_s(x: CoeffElem):
    if x.tower.n <= 1:
        raise ValueError("nu_s needs n > 1")
    if not x._terms:
        return INF
    return min(k[0] * (x.tower.n - 1) for k in x._terms)


def parity_split(x: CoeffElem) -> tuple[CoeffElem, CoeffElem]:
    even = {k: v for k, v in x._terms.items() if k[0] % 2 == 0}
    odd = {k: v for k, v in x._terms.items() if k[0] % 2}
    return CoeffElem(x.tower, even, _trusted=True), CoeffElem(x.tower, odd, _trusted=True)


def f_project(x: CoeffElem) -> CoeffElem:
    return parity_split(x)[1]


def phi_sign(tower: TowerConfig, key: Key) -> int:
    p, beta, t = key
    mu = tower.monoid.mu_of(beta)
    if mu % 2:
        raise OddMaslov(f"class {beta} has odd Maslov index {mu}")
    e = 0
    d = p * (1 - tower.n)
    e += d * (d - 1) // 2
    e += mu // 2
    for l, deg in zip(t, tower.vars.t_degrees):
        if deg % 2:
            raise ValueError("phi_star needs even t-degrees")
        e += l * deg // 2
    return -1 if e % 2 else 1


def phi_star(x: CoeffElem) -> CoeffElem:
    return CoeffElem(x.tower, {k: phi_sign(x.tower, k) * v for k, v in x._terms.items()}, _trusted=True)


def _parity(x: CoeffElem):
    ps = {k[0] % 2 for k in x._terms}
    if len(ps) > 1:
        raise NonHomogeneous("mixed s-parity")
    return ps.pop() if ps else 0


def bracket_scalar(x: CoeffElem, y: CoeffElem) -> CoeffElem:
    """Graded commutator xy - (-1)^{|x||y|} yx, evaluated term by term."""
    _parity(x)
    _parity(y)
    tower = x.tower
    acc: dict = {}
    for a, u in x._terms.items():
        da = tower.key_degree(a)
        for b, v in y._terms.items():
            db = tower.key_degree(b)
            s1, k = key_mul(tower, a, b)
            s2, _ = key_mul(tower, b, a)
            coeff = (s1 - (-1) ** ((da * db) % 2) * s2) * u * v
            if coeff and tower.keep(k):
                acc[k] = acc.get(k, 0) + coeff
    return CoeffElem(tower, {k: v for k, v in acc.items() if v}, _trusted=True)


def is_central(x: CoeffElem) -> bool:
    """Membership in the even s-parity part, the ring over which F is linear."""
    return all(k[0] % 2 == 0 for k in x._terms)


def format_coeff(x: CoeffElem) -> str:
    if not x._terms:
        return "0"
    parts = []
    for k, v in sorted(x._terms.items()):
        parts.append(format_term(x.tower, k, v))
    out = " + ".join(parts)
    return out.replace("+ -", "- ")


def format_term(tower: TowerConfig, key: Key, v: Fraction, suffix: str = "") -> str:
    p, beta, t = key
    factors = []
    if p:
        factors.append("s" if p == 1 else f"s^{p}")
    if any(beta):
        factors.append("T^[" + ",".join(str(b) for b in beta) + "]")
    if any(t):
        factors.append("t^[" + ",".join(str(b) for b in t) + "]")
    if suffix:
        factors.append(suffix)
    c = str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if not factors:
        return c
    if v == 1:
        return "*".join(factors)
    if v == -1:
        return "-" + "*".join(factors)
    return c + "*" + "*".join(factors)
