"""Fixture algebras: spheres, a real model, an obstructed model, and mutations."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .algebra import AInftyAlgebra, BadModel, build_algebra, check_axioms
from .coeff import FormalVarSpec, MonoidSpec, TowerConfig


class BadDegreeData(ValueError):
    pass


@dataclass
class ModelDescriptor:
    name: str
    algebra: AInftyAlgebra
    properties: dict = field(default_factory=dict)

    @property
    def tower(self) -> TowerConfig:
        return self.algebra.tower

    def to_json(self) -> dict:
        d = self.algebra.to_json()
        d["properties"] = dict(sorted(self.properties.items()))
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, d: dict, check_monoid: bool = True) -> "ModelDescriptor":
        alg = AInftyAlgebra.from_json(d, check_monoid)
        return cls(alg.name, alg, dict(d.get("properties", {})))


def default_s_max(n: int) -> int:
    # large enough that s^3 terms (cubic superpotential) and one extra cell survive
    return max(4, math.ceil((n + 4) / (n - 1)))


def _unit_ops(basis) -> list:
    ops = []
    for name, deg in basis:
        ops.append((("e", name), name, 1))
        if name != "e":
            ops.append(((name, "e"), name, (-1) ** deg))
    return ops


def _sphere_tower(n, e_max, s_max, monoid, tvars=(), real=False) -> TowerConfig:
    return TowerConfig(n, Fraction(e_max), default_s_max(n) if s_max is None else s_max, monoid,
                       FormalVarSpec(tuple(tvars)), real)


def formal_sphere(n: int, e_max=3, s_max=None) -> ModelDescriptor:
    if n < 2:
        raise BadDegreeData("formal_sphere needs n >= 2")
    monoid = MonoidSpec(1, (1,), (2 * n,), ((1,),))
    tower = _sphere_tower(n, e_max, s_max, monoid)
    basis = [("e", 0), ("vol", n)]
    pairing = [("e", "vol", (-1) ** n), ("vol", "e", 1)]
    alg = build_algebra(f"formal_sphere_{n}", tower, basis, "e", _unit_ops(basis), pairing)
    return ModelDescriptor(alg.name, alg, {"real": False, "sphere": True, "solver": "ok",
                                           "in_existence_hypotheses": True})


def quantum_sphere(n: int = 2, omega=1, mu=None, e_max=3, s_max=None) -> ModelDescriptor:
    """Sphere with the quantum product vol*vol = T^beta e."""
    if n % 2:
        raise BadDegreeData("quantum_sphere needs n even")
    mu = 2 * n if mu is None else mu
    if mu != 2 * n:
        raise BadDegreeData(f"the quantum product needs mu(beta) = {2 * n}, got {mu}")
    if Fraction(omega) <= 0:
        raise BadDegreeData("omega(beta) must be positive")
    monoid = MonoidSpec(1, (Fraction(omega),), (mu,), ((1,),))
    tower = _sphere_tower(n, e_max, s_max, monoid)
    basis = [("e", 0), ("vol", n)]
    ops = _unit_ops(basis) + [(("vol", "vol"), "e", 1, (1,))]
    pairing = [("e", "vol", 1), ("vol", "e", 1)]
    alg = build_algebra(f"quantum_sphere_{n}", tower, basis, "e", ops, pairing)
    return ModelDescriptor(alg.name, alg, {"real": False, "sphere": True, "solver": "ok",
                                           "in_existence_hypotheses": True})


def real_model(e_max=3, s_max=None) -> ModelDescriptor:
    """n = 2 quantum sphere with a central curvature term m_0 = T^disk e, built phi*-self-dual."""
    n = 2
    monoid = MonoidSpec(2, (Fraction(1), Fraction(1, 2)), (4, 2), ((1, 0), (0, 1)))
    tower = _sphere_tower(n, e_max, s_max, monoid, real=True)
    basis = [("e", 0), ("vol", n)]
    ops = _unit_ops(basis) + [(("vol", "vol"), "e", 1, (1, 0)), ((), "e", 1, (0, 1))]
    pairing = [("e", "vol", 1), ("vol", "e", 1)]
    alg = build_algebra("real_model_2", tower, basis, "e", ops, pairing)
    return ModelDescriptor(alg.name, alg, {"real": True, "sphere": True, "solver": "ok",
                                           "in_existence_hypotheses": True})


def obstructed_fixture(e_max=1, s_max=4) -> ModelDescriptor:
    """n = 2 model with two degree-1 classes whose differential hits the curvature.

    m_1(vol) = T^beta x and m_1(y) = -T^beta e make s T^beta x a closed but
    non-exact obstruction for b = s vol at the first positive energy.
    """
    n = 2
    monoid = MonoidSpec(1, (1,), (2,), ((1,),))
    tower = TowerConfig(n, Fraction(e_max), s_max, monoid)
    basis = [("e", 0), ("x", 1), ("y", 1), ("vol", 2)]
    ops = _unit_ops(basis) + [
        (("x", "y"), "vol", -1), (("y", "x"), "vol", 1),
        (("vol",), "x", 1, (1,)), (("y",), "e", -1, (1,)),
    ]
    pairing = [("x", "y", -1), ("y", "x", 1), ("e", "vol", 1), ("vol", "e", 1)]
    alg = build_algebra("obstructed", tower, basis, "e", ops, pairing)
    return ModelDescriptor(alg.name, alg, {"real": False, "sphere": False, "solver": "obstructed",
                                           "obstruction_level": 1, "obstruction_dim": 1,
                                           "in_existence_hypotheses": False})


def disaster_fixture() -> ModelDescriptor:
    """Energies cancel: T^(1,1) has zero energy without being constant.  Not a valid tower."""
    monoid = MonoidSpec(2, (Fraction(1), Fraction(-1)), (0, 0), ((1, 0), (1, 1)), check=False)
    tower = TowerConfig(2, Fraction(2), 4, monoid)
    basis = [("e", 0), ("vol", 2)]
    ops = _unit_ops(basis) + [(("vol",), "vol", 1, (1, 1))]
    pairing = [("e", "vol", 1), ("vol", "e", 1)]
    alg = build_algebra("disaster", tower, basis, "e", ops, pairing)
    return ModelDescriptor(alg.name, alg, {"real": False, "sphere": False, "solver": "unchecked",
                                           "in_existence_hypotheses": False})


def shipped_models() -> list:
    return [formal_sphere(2), formal_sphere(3), quantum_sphere(2), real_model(), obstructed_fixture()]


# ----------------------------------------------------------------------------
# mutation fixtures: one flipped or injected constant each
# ----------------------------------------------------------------------------

def _mutate_pairing(alg, key, factor):
    p = dict(alg.pairing)
    p[key] = tuple((k, c * factor) for k, c in p[key])
    return alg.replace(name=alg.name + "~pair", pairing=p)


def _with_ops(alg, extra, name, drop=()):
    tower = alg.tower
    ops = {k: dict(t) for k, t in alg.ops.items()}
    names = alg.basis.names
    for tup in drop:
        tup = tuple(names.index(x) for x in tup)
        ops[len(tup)].pop(tup, None)
    zt = (0,) * tower.vars.count
    for inputs, output, c, *rest in extra:
        beta = tuple(rest[0]) if rest else tower.monoid.zero()
        t = tuple(rest[1]) if len(rest) > 1 else zt
        tup = tuple(names.index(x) for x in inputs)
        table = ops.setdefault(len(tup), {})
        table[tup] = tuple(table.get(tup, ())) + (((names.index(output), beta, t), Fraction(c)),)
    ops = {k: v for k, v in ops.items() if v}
    return alg.replace(name=name, ops=ops)


def cup_fixture() -> AInftyAlgebra:
    """The obstructed fixture with its differential removed: a plain cup-product algebra."""
    return _with_ops(obstructed_fixture().algebra, [], "cup", drop=[("y",), ("vol",)])


def _flat_sphere_with_curvature() -> AInftyAlgebra:
    n = 2
    monoid = MonoidSpec(1, (1,), (0,), ((1,),))
    tower = TowerConfig(n, Fraction(2), 4, monoid)
    basis = [("e", 0), ("vol", n)]
    pairing = [("e", "vol", 1), ("vol", "e", 1)]
    return build_algebra("fs~top_m0", tower, basis, "e", _unit_ops(basis) + [((), "vol", 1, (1,))], pairing)


def mutation_fixtures() -> list:
    """(label, algebra, first failing property).

    Sign flips change one stored sign; injections add one constant.
    """
    fs = formal_sphere(2).algebra
    qs = quantum_sphere(2).algebra
    ob = obstructed_fixture().algebra
    cup = cup_fixture()
    ix = ob.basis.index
    e, vol = fs.basis.index("e"), fs.basis.index("vol")
    out = [
        ("flip_pairing_e_vol", _mutate_pairing(fs, (e, vol), -1), 8),
        ("flip_unit_right", _with_ops(fs, [(("vol", "e"), "vol", -1)], "fs~unit", drop=[("vol", "e")]), 2),
        ("flip_unit_left_quantum", _with_ops(qs, [(("e", "vol"), "vol", -1)], "qs~unit", drop=[("e", "vol")]), 2),
        ("flip_pairing_x_y", _mutate_pairing(ob, (ix("x"), ix("y")), -1), 8),
        ("flip_cup_x_y", _with_ops(ob, [(("x", "y"), "vol", 1)], "ob~cup", drop=[("x", "y")]), 2),
        ("flip_differential_vol", _with_ops(ob, [(("vol",), "x", -1, (1,))], "ob~dvol", drop=[("vol",)]), 2),
        ("flip_differential_y", _with_ops(ob, [(("y",), "e", 1, (1,))], "ob~dy", drop=[("y",)]), 2),
        ("inject_degree_mismatch", _with_ops(qs, [(("vol", "vol"), "vol", 1, (1,))], "qs~deg"), 1),
        ("inject_zero_energy_curvature", _with_ops(fs, [((), "vol", 1)], "fs~m0"), 3),
        ("inject_unit_slot_m3", _with_ops(cup, [(("x", "e", "y"), "y", 1)], "cup~m3"), 2),
        ("inject_pairing_degree", _with_pairing(fs, ("e", "e", 1)), 6),
        ("inject_scaled_pairing", _mutate_pairing(_mutate_pairing(cup, (ix("x"), ix("y")), 2),
                                                  (ix("y"), ix("x")), 2), 9),
        ("inject_top_curvature", _flat_sphere_with_curvature(), 10),
    ]
    return out


def _with_pairing(alg, entry) -> AInftyAlgebra:
    i, j, c = entry
    key = (alg.basis.index(i), alg.basis.index(j))
    p = dict(alg.pairing)
    p[key] = tuple(p.get(key, ())) + (((alg.tower.monoid.zero(), (0,) * alg.tower.vars.count), Fraction(c)),)
    return alg.replace(name=alg.name + "~pdeg", pairing=p)


# ----------------------------------------------------------------------------
# persisted descriptors
# ----------------------------------------------------------------------------

MODEL_FILES = {
    "formal_sphere_2.json": lambda: formal_sphere(2),
    "formal_sphere_3.json": lambda: formal_sphere(3),
    "quantum_sphere_2.json": lambda: quantum_sphere(2),
    "real_model_2.json": real_model,
    "obstructed.json": obstructed_fixture,
}


def load_model(path, check: bool = True) -> ModelDescriptor:
    d = json.loads(Path(path).read_text())
    desc = ModelDescriptor.from_json(d)
    if check:
        validate_descriptor(desc)
    return desc


def validate_descriptor(desc: ModelDescriptor):
    """Models are data; nothing downstream trusts one that fails the checker."""
    rep = check_axioms(desc.algebra)
    if not rep.ok:
        v = rep.first
        raise BadModel(f"{desc.name} fails property ({v.prop}): {v.detail}")
    if desc.properties.get("real"):
        from .algebra import self_dual_defect, test_vectors
        import itertools
        vecs = test_vectors(desc.algebra, True)
        for k in range(0, 3):
            for args in itertools.product(vecs, repeat=k):
                if self_dual_defect(desc.algebra, list(args)):
                    raise BadModel(f"{desc.name} is declared real but is not phi*-self-dual")
    top = top_degree_violations(desc.algebra)
    if top:
        raise BadModel(f"{desc.name}: top-degree pattern fails: {top[0]}")


def top_degree_violations(alg: AInftyAlgebra) -> list:
    """Degree-n outputs may only come from m_0, m_1 and m_2."""
    n = alg.tower.n
    out = []
    for k, table in alg.ops.items():
        if k <= 2:
            continue
        for tup, vals in table.items():
            for (w, beta, t), c in vals:
                if alg.basis.degrees[w] == n:
                    out.append(f"m_{k}{tuple(alg.basis.names[v] for v in tup)} has a top-degree output")
    return out


def write_models(directory) -> dict:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = {}
    for fname, ctor in sorted(MODEL_FILES.items()):
        desc = ctor()
        (directory / fname).write_text(desc.dumps())
        manifest[fname] = {"name": desc.name, **desc.properties}
    muts = {}
    for label, alg, prop in mutation_fixtures():
        fname = f"mutation_{label}.json"
        (directory / fname).write_text(alg.dumps())
        muts[fname] = {"expected_property": prop}
    out = {"models": manifest, "mutations": muts}
    (directory / "manifest.json").write_text(json.dumps(out, indent=1, sort_keys=True) + "\n")
    return out
