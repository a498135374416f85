"""Curved cyclic unital A∞ algebras on a finite graded basis.

Structure constants are stored over R (no s-powers).  Evaluation on S ⊗ C
always goes through :func:`eval_mk`, whose single sign rule pulls each
coefficient c_i out of its slot past the shifted degrees of the earlier
basis vectors:

    m(c_1 v_1, ..., c_k v_k) = (-1)^{Σ_i |c_i| (1 + Σ_{j<i} (|v_j|+1))} c_1⋯c_k · m(v_1, ..., v_k).
"""
from __future__ import annotations

import itertools
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .coeff import (INF, CoeffElem, FormalVarSpec, MonoidSpec, NonHomogeneous, TowerConfig, frac,
                    frac_str, format_term, key_mul, phi_sign)


class ArityOverflow(ValueError):
    pass


class NotInvolution(ValueError):
    pass


class BadModel(ValueError):
    pass


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("AINFTY_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn: Callable, items: Sequence) -> list:
    workers = thread_count()
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class GradedBasis:
    names: tuple
    degrees: tuple
    unit_index: int

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        if len(set(self.names)) != len(self.names):
            raise BadModel("basis names must be unique")
        if len(self.names) != len(self.degrees):
            raise BadModel("one degree per basis name")
        if self.degrees[self.unit_index] != 0:
            raise BadModel("the unit has degree 0")

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown basis element {name!r}") from None

    def __len__(self):
        return len(self.names)


class Element:
    """Sparse S⊗R-weighted combination of basis vectors.

    Keys are ``(basis_index, s_pow, beta, t_exp)``.
    """

    __slots__ = ("tower", "basis", "_terms")

    def __init__(self, tower: TowerConfig, basis: GradedBasis, terms: Mapping | Iterable = (), _trusted=False):
        self.tower = tower
        self.basis = basis
        if _trusted:
            self._terms = terms
            return
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for key, c in items:
            v, p, beta, t = key
            key = (int(v), int(p), tuple(beta), tuple(t))
            if not tower.keep(key[1:]):
                continue
            acc[key] = acc.get(key, Fraction(0)) + frac(c)
        self._terms = {k: x for k, x in acc.items() if x != 0}

    @classmethod
    def zero(cls, tower, basis) -> "Element":
        return cls(tower, basis, {}, _trusted=True)

    @classmethod
    def from_coeffs(cls, tower, basis, coeffs: Mapping) -> "Element":
        terms = {}
        for v, c in coeffs.items():
            if isinstance(v, str):
                v = basis.index(v)
            for k, x in c.terms.items():
                terms[(v,) + k] = x
        return cls(tower, basis, terms, _trusted=True)

    @property
    def terms(self):
        return self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self._terms
        if not isinstance(other, Element):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def _new(self, terms) -> "Element":
        return Element(self.tower, self.basis, terms, _trusted=True)

    def __add__(self, other: "Element") -> "Element":
        if isinstance(other, int) and other == 0:
            return self
        acc = dict(self._terms)
        for k, v in other._terms.items():
            s = acc.get(k, 0) + v
            if s:
                acc[k] = s
            else:
                acc.pop(k, None)
        return self._new(acc)

    __radd__ = __add__

    def __neg__(self):
        return self._new({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Element":
        c = frac(c)
        if not c:
            return self._new({})
        return self._new({k: v * c for k, v in self._terms.items()})

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def component(self, v) -> CoeffElem:
        if isinstance(v, str):
            v = self.basis.index(v)
        return CoeffElem(self.tower, {k[1:]: x for k, x in self._terms.items() if k[0] == v}, _trusted=True)

    def support(self) -> list:
        return sorted({k[0] for k in self._terms})

    def term_degree(self, key) -> int:
        return self.basis.degrees[key[0]] + self.tower.key_degree(key[1:])

    def degrees(self) -> set:
        return {self.term_degree(k) for k in self._terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> int:
        ds = self.degrees()
        if len(ds) > 1:
            raise NonHomogeneous(f"element has degrees {sorted(ds)}")
        if not ds:
            raise NonHomogeneous("the zero element has no degree")
        return ds.pop()

    def nu(self):
        if not self._terms:
            return INF
        return min(self.tower.key_nu(k[1:]) for k in self._terms)

    def nu_total(self):
        """ν_S ⊗ ν: the minimum over terms of s_pow·(n-1) + energy."""
        if not self._terms:
            return INF
        return min(k[1] * (self.tower.n - 1) + self.tower.key_nu(k[1:]) for k in self._terms)

    def filter(self, pred: Callable) -> "Element":
        return self._new({k: v for k, v in self._terms.items() if pred(k)})

    def energy_part(self, energy) -> "Element":
        return self.filter(lambda k: self.tower.key_nu(k[1:]) == energy)

    def residue(self) -> "Element":
        return self.energy_part(0)

    def energies(self) -> list:
        return sorted({self.tower.key_nu(k[1:]) for k in self._terms})

    def lmul(self, c: CoeffElem) -> "Element":
        """c · x, with c ∈ S⊗R acting on the left."""
        acc: dict = {}
        for a, u in c.terms.items():
            for k, v in self._terms.items():
                sign, kk = key_mul(self.tower, a, k[1:])
                if not self.tower.keep(kk):
                    continue
                key = (k[0],) + kk
                s = acc.get(key, 0) + sign * u * v
                if s:
                    acc[key] = s
                else:
                    acc.pop(key, None)
        return self._new(acc)

    def rmul(self, c: CoeffElem) -> "Element":
        """x · c for the bimodule structure induced by the C[1] grading."""
        tower = self.tower
        acc: dict = {}
        for k, v in self._terms.items():
            vi, p, beta, t = k
            r_plus_v = tower.r_degree(beta, t) + self.basis.degrees[vi]
            for a, u in c.terms.items():
                q, b_beta, b_t = a
                sq = q * (1 - tower.n)
                e = (sq + tower.r_degree(b_beta, b_t)) * (r_plus_v + 1)
                # (s^p r)(s^q b) reorders r past s^q inside S⊗R
                e += tower.r_degree(beta, t) * sq
                kk = (p + q, tuple(x + y for x, y in zip(beta, b_beta)), tuple(x + y for x, y in zip(t, b_t)))
                if not tower.keep(kk):
                    continue
                key = (vi,) + kk
                s = acc.get(key, 0) + (-1) ** (e % 2) * u * v
                if s:
                    acc[key] = s
                else:
                    acc.pop(key, None)
        return self._new(acc)

    def map_coeffs(self, fn: Callable) -> "Element":
        """Apply a per-monomial sign/scalar function fn(key) -> Fraction."""
        return self._new({k: v * fn(k[1:]) for k, v in self._terms.items() if fn(k[1:])})

    def to_json(self) -> list:
        return [{"basis": self.basis.names[k[0]], "s_pow": k[1], "beta": list(k[2]), "t_exp": list(k[3]),
                 "coeff": frac_str(v)} for k, v in sorted(self._terms.items())]

    @classmethod
    def from_json(cls, tower, basis, data) -> "Element":
        return cls(tower, basis, [((basis.index(d["basis"]), d["s_pow"], tuple(d["beta"]), tuple(d["t_exp"])),
                                   frac(d["coeff"])) for d in data])

    def __repr__(self):
        return f"Element({format_element(self)})"


def format_element(x: Element) -> str:
    if not x.terms:
        return "0"
    parts = [format_term(x.tower, k[1:], v, x.basis.names[k[0]]) for k, v in sorted(x.terms.items())]
    return " + ".join(parts).replace("+ -", "- ")


@dataclass(eq=False)
class AInftyAlgebra:
    """Finite A∞ algebra: ops[k][(v_1..v_k)] = ((w, beta, t_exp), coeff) tuples."""
    name: str
    tower: TowerConfig
    basis: GradedBasis
    ops: dict
    pairing: dict
    k_max: int = 4
    gamma_tag: str = "0"
    meta: dict = field(default_factory=dict)
    strict: bool = False

    def __post_init__(self):
        self._cache: dict = {}
        self.validate_shape()

    def validate_shape(self):
        tw = self.tower
        for k, table in self.ops.items():
            if k > self.k_max:
                raise BadModel(f"arity {k} exceeds k_max={self.k_max}")
            for tup, vals in table.items():
                if len(tup) != k:
                    raise BadModel("input tuple length does not match arity")
                for (w, beta, t), c in vals:
                    if not tw.monoid.is_allowed(beta):
                        raise BadModel(f"class {beta} outside the allowed cone")
        for (i, j), vals in self.pairing.items():
            for (beta, t), c in vals:
                if not tw.monoid.is_allowed(beta):
                    raise BadModel(f"class {beta} outside the allowed cone")

    def require_even_r(self):
        """Shipped models keep all R-degrees even (R is then central)."""
        tw = self.tower
        for table in self.ops.values():
            for vals in table.values():
                for (w, beta, t), c in vals:
                    if tw.r_degree(beta, t) % 2:
                        raise BadModel("structure constant with odd R-degree")
        if any(d % 2 for d in tw.vars.t_degrees) or any(m % 2 for m in tw.monoid.mu):
            raise BadModel("all R-degrees must be even")

    # elements
    def zero(self) -> Element:
        return Element.zero(self.tower, self.basis)

    def vec(self, name, coeff: CoeffElem | None = None) -> Element:
        v = self.basis.index(name) if isinstance(name, str) else name
        if coeff is None:
            coeff = CoeffElem.scalar(self.tower, 1)
        return Element.from_coeffs(self.tower, self.basis, {v: coeff})

    def mono(self, name, s_pow=0, beta=None, t_exp=None, c=1) -> Element:
        return self.vec(name, CoeffElem.monomial(self.tower, s_pow, beta, t_exp, c))

    @property
    def unit(self) -> Element:
        return self.vec(self.basis.unit_index)

    @property
    def n(self) -> int:
        return self.tower.n

    def top_indices(self) -> list:
        return [i for i, d in enumerate(self.basis.degrees) if d == self.tower.n]

    def r_value(self, vals) -> CoeffElem:
        return CoeffElem(self.tower, [((0,) + tuple(k), c) for k, c in vals])

    def integral_of_basis(self, v: int) -> CoeffElem:
        """∫v from ⟨e, v⟩ = (-1)^{|v|} ∫ v."""
        vals = self.pairing.get((self.basis.unit_index, v), ())
        c = self.r_value(vals)
        return -c if self.basis.degrees[v] % 2 else c

    def vol_index(self) -> int:
        for v in self.top_indices():
            if self.integral_of_basis(v) == CoeffElem.scalar(self.tower, 1):
                return v
        raise BadModel("no top-degree basis element with integral 1")

    def with_tower(self, tower: TowerConfig) -> "AInftyAlgebra":
        return AInftyAlgebra(self.name, tower, self.basis, self.ops, self.pairing, self.k_max,
                             self.gamma_tag, dict(self.meta), self.strict)

    def replace(self, **kw) -> "AInftyAlgebra":
        d = dict(name=self.name, tower=self.tower, basis=self.basis, ops=self.ops, pairing=self.pairing,
                 k_max=self.k_max, gamma_tag=self.gamma_tag, meta=dict(self.meta), strict=self.strict)
        d.update(kw)
        return AInftyAlgebra(**d)

    # serialization
    def to_json(self) -> dict:
        names = self.basis.names
        ops = []
        for k in sorted(self.ops):
            for tup in sorted(self.ops[k]):
                for (w, beta, t), c in sorted(self.ops[k][tup]):
                    ops.append({"k": k, "inputs": [names[i] for i in tup], "beta": list(beta),
                                "t_exp": list(t), "s_pow": 0, "output": names[w], "coeff": frac_str(c)})
        pairing = []
        for (i, j) in sorted(self.pairing):
            for (beta, t), c in sorted(self.pairing[(i, j)]):
                pairing.append({"i": names[i], "j": names[j], "beta": list(beta), "t_exp": list(t),
                                "coeff": frac_str(c)})
        return {"name": self.name, "n": self.tower.n, "e_max": frac_str(self.tower.e_max),
                "s_max": self.tower.s_max, "real": self.tower.real, "monoid": self.tower.monoid.to_json(),
                "t_vars": list(self.tower.vars.t_degrees),
                "basis": [{"name": nm, "degree": d} for nm, d in zip(names, self.basis.degrees)],
                "unit": names[self.basis.unit_index], "k_max": self.k_max, "gamma_tag": self.gamma_tag,
                "ops": ops, "pairing": pairing, "meta": self.meta}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, d: Mapping, check_monoid: bool = True) -> "AInftyAlgebra":
        monoid = MonoidSpec.from_json(d["monoid"], check=check_monoid)
        tower = TowerConfig(int(d["n"]), frac(d.get("e_max", "4")), int(d.get("s_max", 4)), monoid,
                            FormalVarSpec(tuple(d.get("t_vars", ()))), bool(d.get("real", False)))
        names = [b["name"] for b in d["basis"]]
        basis = GradedBasis(tuple(names), tuple(b["degree"] for b in d["basis"]), names.index(d["unit"]))
        zt = (0,) * tower.vars.count
        ops: dict = {}
        for o in d.get("ops", []):
            if int(o.get("s_pow", 0)) != 0:
                raise BadModel("base structure constants must not carry s-powers")
            k = int(o["k"])
            tup = tuple(basis.index(nm) for nm in o["inputs"])
            if len(tup) != k:
                raise BadModel("inputs length must equal k")
            beta = tuple(o.get("beta", monoid.zero()))
            t = tuple(o.get("t_exp", zt))
            ops.setdefault(k, {}).setdefault(tup, []).append(((basis.index(o["output"]), beta, t), frac(o["coeff"])))
        pairing: dict = {}
        for p in d.get("pairing", []):
            key = (basis.index(p["i"]), basis.index(p["j"]))
            beta = tuple(p.get("beta", monoid.zero()))
            t = tuple(p.get("t_exp", zt))
            pairing.setdefault(key, []).append(((beta, t), frac(p["coeff"])))
        return cls(d.get("name", "model"), tower, basis, _freeze_ops(ops), _freeze_pairing(pairing),
                   int(d.get("k_max", 4)), str(d.get("gamma_tag", "0")), dict(d.get("meta", {})))

    @classmethod
    def loads(cls, text: str, check_monoid: bool = True) -> "AInftyAlgebra":
        return cls.from_json(json.loads(text), check_monoid)


def _merge(vals) -> tuple:
    acc: dict = {}
    for k, c in vals:
        acc[k] = acc.get(k, Fraction(0)) + frac(c)
    return tuple(sorted((k, c) for k, c in acc.items() if c))


def _freeze_ops(ops: Mapping) -> dict:
    out = {}
    for k, table in ops.items():
        t2 = {tuple(tup): _merge(vals) for tup, vals in table.items()}
        t2 = {tup: v for tup, v in t2.items() if v}
        if t2:
            out[int(k)] = t2
    return out


def _freeze_pairing(pairing: Mapping) -> dict:
    out = {tuple(ij): _merge(vals) for ij, vals in pairing.items()}
    return {ij: v for ij, v in out.items() if v}


def build_algebra(name: str, tower: TowerConfig, basis: Sequence, unit: str, ops: Iterable, pairing: Iterable,
                  k_max: int = 4, gamma_tag: str = "0", meta: dict | None = None) -> AInftyAlgebra:
    """Convenience constructor.

    ``basis`` is a list of (name, degree); ``ops`` entries are
    ``(inputs, output, coeff[, beta[, t_exp]])``; ``pairing`` entries are
    ``(i, j, coeff[, beta[, t_exp]])``.
    """
    names = [b[0] for b in basis]
    gb = GradedBasis(tuple(names), tuple(b[1] for b in basis), names.index(unit))
    zb = tower.monoid.zero()
    zt = (0,) * tower.vars.count
    table: dict = {}
    for entry in ops:
        inputs, output, c = entry[:3]
        beta = tuple(entry[3]) if len(entry) > 3 else zb
        t = tuple(entry[4]) if len(entry) > 4 else zt
        tup = tuple(gb.index(x) for x in inputs)
        table.setdefault(len(tup), {}).setdefault(tup, []).append(((gb.index(output), beta, t), frac(c)))
    pair: dict = {}
    for entry in pairing:
        i, j, c = entry[:3]
        beta = tuple(entry[3]) if len(entry) > 3 else zb
        t = tuple(entry[4]) if len(entry) > 4 else zt
        pair.setdefault((gb.index(i), gb.index(j)), []).append(((beta, t), frac(c)))
    return AInftyAlgebra(name, tower, gb, _freeze_ops(table), _freeze_pairing(pair), k_max, gamma_tag, meta or {})


# ----------------------------------------------------------------------------
# the sign engine
# ----------------------------------------------------------------------------

def koszul_exponent(coeff_degrees: Sequence[int], basis_degrees: Sequence[int]) -> int:
    """Σ_i |c_i| (1 + Σ_{j<i} (|v_j|+1)), the one sign rule every extended operation uses."""
    e = 0
    prefix = 0
    for cd, vd in zip(coeff_degrees, basis_degrees):
        e += cd * (1 + prefix)
        prefix += vd + 1
    return e


def _eval_keys(alg: AInftyAlgebra, keys: tuple) -> tuple:
    cache = alg._cache
    hit = cache.get(keys)
    if hit is not None:
        return hit
    k = len(keys)
    table = alg.ops.get(k)
    consts = table.get(tuple(key[0] for key in keys)) if table else None
    if not consts:
        cache[keys] = ()
        return ()
    tower = alg.tower
    degs = alg.basis.degrees
    cur = tower.zero_key()
    sign = 1
    cdeg = []
    for key in keys:
        ck = key[1:]
        cdeg.append(tower.key_degree(ck))
        s, cur = key_mul(tower, cur, ck)
        sign *= s
    if koszul_exponent(cdeg, [degs[key[0]] for key in keys]) % 2:
        sign = -sign
    out = []
    if tower.keep(cur):
        for (w, beta, t), c in consts:
            kk = (cur[0], tuple(x + y for x, y in zip(cur[1], beta)), tuple(x + y for x, y in zip(cur[2], t)))
            if tower.keep(kk):
                out.append(((w,) + kk, sign * c))
    res = tuple(out)
    cache[keys] = res
    return res


def eval_unchecked(alg: AInftyAlgebra, args: Sequence[Element]) -> Element:
    k = len(args)
    if k > alg.k_max:
        if alg.strict:
            raise ArityOverflow(f"arity {k} > k_max {alg.k_max}")
        return alg.zero()
    if k not in alg.ops:
        return alg.zero()
    acc: dict = {}
    for combo in itertools.product(*[tuple(a._terms.items()) for a in args]):
        c = Fraction(1)
        keys = []
        for key, x in combo:
            c *= x
            keys.append(key)
        for key, y in _eval_keys(alg, tuple(keys)):
            s = acc.get(key, 0) + c * y
            if s:
                acc[key] = s
            else:
                acc.pop(key, None)
    return Element(alg.tower, alg.basis, acc, _trusted=True)


def eval_mk(alg: AInftyAlgebra, args: Sequence[Element]) -> Element:
    for a in args:
        if not a.is_homogeneous():
            raise NonHomogeneous("eval_mk needs homogeneous arguments")
    return eval_unchecked(alg, args)


def a_infty_defect(alg: AInftyAlgebra, args: Sequence[Element]) -> Element:
    args = list(args)
    k = len(args)
    shifted = [(a.degree() + 1) if a else 0 for a in args]
    total = alg.zero()
    for k2 in range(0, k + 1):
        k1 = k + 1 - k2
        if k1 > alg.k_max or k2 > alg.k_max or k1 not in alg.ops or k2 not in alg.ops:
            continue
        for i in range(0, k - k2 + 1):
            inner = eval_unchecked(alg, args[i:i + k2])
            if not inner:
                continue
            outer = eval_unchecked(alg, args[:i] + [inner] + args[i + k2:])
            if sum(shifted[:i]) % 2:
                outer = -outer
            total = total + outer
    return total


def pairing(alg: AInftyAlgebra, x: Element, y: Element, use_f: bool = True) -> CoeffElem:
    """⟨c_1 v_1, c_2 v_2⟩ = (-1)^{|c_2|(|v_1|+1)} F(c_1 c_2) ⟨v_1, v_2⟩ (F omitted when use_f is False)."""
    tower = alg.tower
    degs = alg.basis.degrees
    acc: dict = {}
    for k1, a in x._terms.items():
        for k2, b in y._terms.items():
            vals = alg.pairing.get((k1[0], k2[0]))
            if not vals:
                continue
            sign, ck = key_mul(tower, k1[1:], k2[1:])
            if use_f and ck[0] % 2 == 0:
                continue
            if (tower.key_degree(k2[1:]) * (degs[k1[0]] + 1)) % 2:
                sign = -sign
            for (beta, t), c in vals:
                kk = (ck[0], tuple(p + q for p, q in zip(ck[1], beta)), tuple(p + q for p, q in zip(ck[2], t)))
                if not tower.keep(kk):
                    continue
                s = acc.get(kk, 0) + sign * a * b * c
                if s:
                    acc[kk] = s
                else:
                    acc.pop(kk, None)
    return CoeffElem(tower, acc, _trusted=True)


def pairing_F(alg: AInftyAlgebra, x: Element, y: Element) -> CoeffElem:
    if not x.is_homogeneous() or not y.is_homogeneous():
        raise NonHomogeneous("pairing_F needs homogeneous arguments")
    return pairing(alg, x, y, use_f=True)


def integral(alg: AInftyAlgebra, x: Element) -> CoeffElem:
    """∫x = Σ_v c_v ∫v."""
    out = CoeffElem.zero(alg.tower)
    for v in x.support():
        iv = alg.integral_of_basis(v)
        if iv:
            out = out + x.component(v) * iv
    return out


def cyclic_structure_defect(alg: AInftyAlgebra, args: Sequence[Element], use_f: bool = True) -> CoeffElem:
    """Right-hand side of the cyclic structure equation; the left side vanishes as d = 0 on R."""
    args = list(args)
    K = len(args)           # k + 1 inputs
    k = K - 1
    sh = [(a.degree() + 1) for a in args]
    total = CoeffElem.zero(alg.tower)
    for k2 in range(0, k + 1):
        k1 = k + 1 - k2
        for i in range(1, k1 + 1):
            outer_in = args[i + k2 - 1:] + args[:i - 1]
            inner_in = args[i - 1:i + k2 - 1]
            e = sum(sh[:i - 1])
            for j in range(i + k2, K + 1):
                e += sh[j - 1] * (sum(sh) - sh[j - 1] + 1)
            e += 1
            inner = eval_unchecked(alg, inner_in)
            if not inner:
                continue
            outer = eval_unchecked(alg, outer_in)
            if not outer:
                continue
            val = pairing(alg, outer, inner, use_f)
            total = total - val if e % 2 else total + val
    return total


def s_tau(shifted: Sequence[int]) -> int:
    e = 0
    for i in range(len(shifted)):
        for j in range(i + 1, len(shifted)):
            e += shifted[i] * shifted[j]
    return e


def opposite(alg: AInftyAlgebra) -> AInftyAlgebra:
    degs = alg.basis.degrees
    ops = {}
    for k, table in alg.ops.items():
        new = {}
        for tup, vals in table.items():
            target = tuple(reversed(tup))
            e = s_tau([degs[v] + 1 for v in target]) + k + 1
            sign = -1 if e % 2 else 1
            new[target] = tuple((key, sign * c) for key, c in vals)
        ops[k] = new
    name = alg.name[:-3] if alg.name.endswith("^op") else alg.name + "^op"
    return alg.replace(name=name, ops=ops)


def apply_involution(alg: AInftyAlgebra, x: Element, basis_map: Mapping | None = None) -> Element:
    """φ* on coefficients tensored with a rational basis map (identity by default)."""
    tower = alg.tower
    acc: dict = {}
    for key, c in x.terms.items():
        sgn = phi_sign(tower, key[1:])
        images = basis_map.get(key[0], ((key[0], Fraction(1)),)) if basis_map else ((key[0], Fraction(1)),)
        for w, a in images:
            kk = (w,) + key[1:]
            s = acc.get(kk, 0) + sgn * c * a
            if s:
                acc[kk] = s
            else:
                acc.pop(kk, None)
    return Element(tower, alg.basis, acc, _trusted=True)


def check_involution(alg: AInftyAlgebra, basis_map: Mapping | None):
    if not basis_map:
        return
    degs = alg.basis.degrees
    for v, images in basis_map.items():
        for w, a in images:
            if degs[w] != degs[v]:
                raise NotInvolution("the involution must have degree 0")
    for v in range(len(alg.basis)):
        x = alg.vec(v)
        if apply_involution(alg, apply_involution(alg, x, basis_map), basis_map) != x:
            raise NotInvolution(f"involution does not square to the identity on {alg.basis.names[v]}")


def self_dual_defect(alg: AInftyAlgebra, args: Sequence[Element], basis_map: Mapping | None = None) -> Element:
    """φ* m_k(α_1..α_k) − (−1)^{1+k+s_τ(α)} m_k(φ*α_k, …, φ*α_1), with shifted degrees in s_τ."""
    check_involution(alg, basis_map)
    args = list(args)
    k = len(args)
    lhs = apply_involution(alg, eval_unchecked(alg, args), basis_map)
    rev = [apply_involution(alg, a, basis_map) for a in reversed(args)]
    e = 1 + k + s_tau([a.degree() + 1 for a in args])
    rhs = eval_unchecked(alg, rev)
    return lhs + rhs if e % 2 else lhs - rhs


# ----------------------------------------------------------------------------
# axiom checking
# ----------------------------------------------------------------------------

PROPERTY_NAMES = {
    1: "multilinearity and degree",
    2: "A-infinity relations",
    3: "filtration of operations",
    4: "unit kills m_k for k != 0, 2",
    5: "unit for m_2",
    6: "pairing bilinearity and degree",
    7: "filtration of pairing",
    8: "pairing symmetry",
    9: "cyclicity",
    10: "<m_0, e> = 0",
}


@dataclass
class Violation:
    prop: int
    detail: str
    inputs: tuple = ()

    def to_json(self) -> dict:
        return {"property": self.prop, "name": PROPERTY_NAMES[self.prop], "detail": self.detail,
                "inputs": list(self.inputs)}


@dataclass
class AxiomReport:
    model: str
    extended: bool
    violations: list
    checked: dict

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def first(self) -> Violation | None:
        return min(self.violations, key=lambda v: v.prop) if self.violations else None

    def failed_properties(self) -> list:
        return sorted({v.prop for v in self.violations})

    def to_json(self) -> dict:
        return {"model": self.model, "extended": self.extended, "ok": self.ok,
                "first_violation": self.first.to_json() if self.first else None,
                "failed_properties": self.failed_properties(),
                "checked": {str(k): v for k, v in sorted(self.checked.items())},
                "violations": [v.to_json() for v in self.violations[:50]]}


def _label(x: Element) -> str:
    from .coeff import format_coeff  # noqa: F401
    return format_element(x)


def test_vectors(alg: AInftyAlgebra, extended: bool, s_powers: Sequence[int] | None = None) -> list:
    if not extended:
        return [alg.vec(v) for v in range(len(alg.basis))]
    if s_powers is None:
        s_powers = range(0, min(2, alg.tower.s_max) + 1)
    return [alg.mono(v, p) for p in s_powers for v in range(len(alg.basis))]


def scalar_samples(alg: AInftyAlgebra, extended: bool) -> list:
    tw = alg.tower
    zb = tw.monoid.zero()
    zt = (0,) * tw.vars.count
    keys = [(0, zb, zt)]
    for g in tw.monoid.allowed_cone:
        keys.append((0, tuple(g), zt))
    for j in range(tw.vars.count):
        keys.append((0, zb, tuple(1 if i == j else 0 for i in range(tw.vars.count))))
    if extended:
        more = [(1, zb, zt), (2, zb, zt)]
        more += [(1,) + k[1:] for k in keys[1:]]
        keys += more
    out = []
    for k in keys:
        c = CoeffElem(tw, {k: 1})
        if c:
            out.append(c)
    return out


def check_axioms(alg: AInftyAlgebra, extended: bool = False, max_arity: int | None = None,
                 s_powers: Sequence[int] | None = None, limit_per_property: int = 5) -> AxiomReport:
    """Exhaustive check of the ten cyclic unital properties on test-vector tuples."""
    if max_arity is None:
        max_arity = min(alg.k_max + 1, 4)
    vecs = test_vectors(alg, extended, s_powers)
    samples = scalar_samples(alg, extended)
    tw = alg.tower
    unit = alg.unit
    viol: list = []
    counts: dict = {p: 0 for p in PROPERTY_NAMES}
    use_f = extended

    def bad(p, detail, inputs=()):
        if sum(1 for v in viol if v.prop == p) < limit_per_property:
            viol.append(Violation(p, detail, tuple(_label(x) for x in inputs)))

    def tuples(k):
        return itertools.product(vecs, repeat=k)

    # (1) degree of structure constants, then multilinearity
    degs = alg.basis.degrees
    for k, table in alg.ops.items():
        for tup, vals in table.items():
            want = sum(degs[v] for v in tup) + 2 - k
            for (w, beta, t), c in vals:
                counts[1] += 1
                if degs[w] + tw.r_degree(beta, t) != want:
                    bad(1, f"m_{k}{tuple(alg.basis.names[v] for v in tup)} -> {alg.basis.names[w]} has degree "
                           f"{degs[w] + tw.r_degree(beta, t)}, expected {want}")
    for k in range(1, min(max_arity, 3) + 1):
        for args in tuples(k):
            args = list(args)
            base = eval_unchecked(alg, args)
            for a in samples:
                counts[1] += 1
                lhs = eval_unchecked(alg, [args[0].lmul(a)] + args[1:])
                sa = a.degree()
                rhs = base.lmul(a)
                if sa % 2:
                    rhs = -rhs
                if lhs != rhs:
                    bad(1, "left linearity fails", args)
                lhs = eval_unchecked(alg, args[:-1] + [args[-1].rmul(a)])
                if lhs != base.rmul(a):
                    bad(1, "right linearity fails", args)
                for i in range(1, k):
                    l2 = eval_unchecked(alg, args[:i - 1] + [args[i - 1].rmul(a), args[i]] + args[i + 1:])
                    r2 = eval_unchecked(alg, args[:i - 1] + [args[i - 1], args[i].lmul(a)] + args[i + 1:])
                    if l2 != r2:
                        bad(1, f"middle linearity fails at slot {i + 1}", args)

    # (2) A∞ relations
    def rel(args):
        d = a_infty_defect(alg, list(args))
        return (args, d)

    for k in range(0, max_arity + 1):
        results = parallel_map(rel, list(tuples(k)))
        for args, d in results:
            counts[2] += 1
            if d:
                bad(2, f"defect {format_element(d)}", args)

    # (3) filtration of operations
    m0 = eval_unchecked(alg, [])
    counts[3] += 1
    if m0 and not m0.nu() > 0:
        bad(3, "nu(m_0) must be positive")
    for k in range(1, max_arity + 1):
        for args in tuples(k):
            counts[3] += 1
            out = eval_unchecked(alg, list(args))
            if out and out.nu() < sum(a.nu() for a in args):
                bad(3, "nu decreases", args)

    # (4) unit annihilation
    for k in (1, 3, 4):
        if k > max_arity:
            continue
        for args in tuples(k - 1):
            for i in range(k):
                full = list(args[:i]) + [unit] + list(args[i:])
                counts[4] += 1
                if eval_unchecked(alg, full):
                    bad(4, f"m_{k} with unit in slot {i + 1} is nonzero", full)

    # (5) unit for m_2
    for a in vecs:
        counts[5] += 1
        if eval_unchecked(alg, [unit, a]) != a:
            bad(5, "m_2(e, a) != a", [a])
        r = eval_unchecked(alg, [a, unit])
        if a.degree() % 2:
            r = -r
        if r != a:
            bad(5, "(-1)^|a| m_2(a, e) != a", [a])

    # (6) pairing degree and bilinearity
    for (i, j), vals in alg.pairing.items():
        for (beta, t), c in vals:
            counts[6] += 1
            if tw.r_degree(beta, t) != degs[i] + degs[j] - tw.n:
                bad(6, f"pairing ({alg.basis.names[i]}, {alg.basis.names[j]}) has the wrong degree")
    for x, y in tuples(2):
        base = pairing(alg, x, y, use_f)
        for a in samples:
            counts[6] += 1
            if pairing(alg, x, y.lmul(a), use_f) != pairing(alg, x.rmul(a), y, use_f):
                bad(6, "<x, a y> != <x a, y>", [x, y])
            if (a.degree() * 0 == 0) and _central(a):
                if pairing(alg, x.lmul(a), y, use_f) != a * base:
                    bad(6, "<b x, y> != b <x, y>", [x, y])

    # (7) filtration of pairing
    weighted = [x.lmul(a) for x in vecs for a in samples[:3]]
    for x in weighted:
        for y in weighted:
            counts[7] += 1
            p = pairing(alg, x, y, use_f)
            if p and _nu(p) < x.nu() + y.nu():
                bad(7, "pairing lowers nu", [x, y])

    # (8) symmetry
    for x, y in tuples(2):
        counts[8] += 1
        lhs = pairing(alg, x, y, use_f)
        rhs = pairing(alg, y, x, use_f)
        e = (x.degree() + 1) * (y.degree() + 1) + 1
        if lhs != (-rhs if e % 2 else rhs):
            bad(8, "symmetry fails", [x, y])

    # (9) cyclicity
    for k in range(1, max_arity):
        for args in tuples(k + 1):
            args = list(args)
            counts[9] += 1
            lhs = pairing(alg, eval_unchecked(alg, args[:k]), args[k], use_f)
            rot = [args[k]] + args[:k - 1]
            rhs = pairing(alg, eval_unchecked(alg, rot), args[k - 1], use_f)
            e = (args[k].degree() + 1) * sum(a.degree() + 1 for a in args[:k])
            if lhs != (-rhs if e % 2 else rhs):
                bad(9, f"cyclicity fails for m_{k}", args)

    # (10)
    counts[10] += 1
    if pairing(alg, m0, unit, use_f):
        bad(10, "<m_0, e> != 0")

    return AxiomReport(alg.name, extended, viol, counts)


def _central(a: CoeffElem) -> bool:
    from .coeff import is_central
    return is_central(a)


def _nu(c: CoeffElem):
    from .coeff import nu
    return nu(c)
