from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ainfty.coeff import (INF, CoeffElem, FormalVarSpec, MonoidSpec, NonHomogeneous, OddMaslov,
                          TowerConfig, bracket_scalar, f_project, format_coeff, is_central, mul, nu,
                          nu_s, parity_split, phi_star)

MONOID = MonoidSpec(1, (Fraction(1),), (2,), ((1,),))
TOWER = TowerConfig(2, 6, 6, MONOID, FormalVarSpec((2,)))


def m(s=0, b=0, t=0, c=1, tower=TOWER):
    return CoeffElem.monomial(tower, s, (b,), (t,) if tower.vars.count else (), Fraction(c))


rationals = st.fractions(min_value=-4, max_value=4, max_denominator=3)
keys = st.tuples(st.integers(0, 3), st.integers(0, 2), st.integers(0, 2))


@st.composite
def elements(draw):
    terms = draw(st.dictionaries(keys, rationals, max_size=4))
    return CoeffElem(TOWER, {(p, (b,), (t,)): v for (p, b, t), v in terms.items() if v})


@st.composite
def homogeneous(draw):
    d = draw(st.integers(-3, 3))
    terms = {}
    for p in range(0, 4):
        r = d + p
        if r < 0 or r % 2:
            continue
        for b in range(0, r // 2 + 1):
            c = draw(rationals)
            if c:
                terms[(p, (b,), (r // 2 - b,))] = c
    return CoeffElem(TOWER, terms)


def sign(x, y):
    return (-1) ** ((x.degree() * y.degree()) % 2)


# --- filtered ring axioms --------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(elements(), elements(), elements())
def test_ring_axioms(x, y, z):
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert (x + y) * z == x * z + y * z
    one = CoeffElem.scalar(TOWER, 1)
    assert one * x == x == x * one
    assert x - x == CoeffElem.zero(TOWER)


@settings(max_examples=200, deadline=None)
@given(elements(), elements())
def test_energy_filtration(x, y):
    assert nu(x * y) >= nu(x) + nu(y)
    assert nu(x + y) >= min(nu(x), nu(y))


@settings(max_examples=200, deadline=None)
@given(homogeneous(), homogeneous())
def test_graded_commutativity_up_to_s_terms(x, y):
    if not x or not y:
        return
    # F is a graded trace: F(xy) = (-1)^{|x||y|} F(yx)
    assert f_project(x * y) == f_project(y * x).scale(sign(x, y))
    # phi* is a graded anti-automorphism and an involution
    assert phi_star(x * y) == (phi_star(y) * phi_star(x)).scale(sign(x, y))
    assert phi_star(phi_star(x)) == x


@settings(max_examples=200, deadline=None)
@given(homogeneous(), homogeneous())
def test_f_is_linear_over_even_part(x, y):
    z = parity_split(x)[0]
    assert is_central(z)
    assert f_project(z * y) == z * f_project(y)


@settings(max_examples=100, deadline=None)
@given(homogeneous(), homogeneous())
def test_bracket_is_graded_antisymmetric(x, y):
    if not x or not y:
        return
    try:
        xy = bracket_scalar(x, y)
    except NonHomogeneous:
        return
    assert xy == -bracket_scalar(y, x).scale(sign(x, y))


@settings(max_examples=200, deadline=None)
@given(elements())
def test_parity_split_and_json(x):
    even, odd = parity_split(x)
    assert even + odd == x
    assert all(k[0] % 2 == 0 for k in even.terms) and all(k[0] % 2 for k in odd.terms)
    assert f_project(x) == odd
    assert CoeffElem.from_json(TOWER, x.to_json()) == x


# --- worked examples -------------------------------------------------------

def test_nu_examples():
    assert nu(m(0, 1, 2)) == 3
    assert nu(CoeffElem.zero(TOWER)) == INF
    tw = TowerConfig(2, 6, 6, MonoidSpec(1, (Fraction(2),), (2,), ((1,),)))
    assert nu(m(0, 0, c=5, tower=tw) + m(0, 1, tower=tw)) == 0


def test_nu_s_examples():
    assert nu_s(m(3)) == 3
    assert nu_s(m(0)) == 0
    tw4 = TowerConfig(4, 6, 6, MONOID)
    assert nu_s(m(1, 1, tower=tw4)) == 3


def test_mul_examples():
    assert mul(m(0, 1), m(0, 2)) == m(0, 3)
    assert mul(m(1), CoeffElem.zero(TOWER)) == CoeffElem.zero(TOWER)
    tight = TOWER.with_cutoffs(s_max=1)
    assert mul(m(1, tower=tight), m(1, tower=tight)) == CoeffElem.zero(tight)


def test_mul_truncates_energy():
    tight = TOWER.with_cutoffs(e_max=1)
    assert m(0, 1, tower=tight) * m(0, 1, tower=tight) == CoeffElem.zero(tight)


def test_parity_split_examples():
    assert parity_split(m(2) + m(1, c=3)) == (m(2), m(1, c=3))
    z = CoeffElem.zero(TOWER)
    assert parity_split(z) == (z, z)
    assert parity_split(m(0, c=7)) == (m(0, c=7), z)


def test_f_project_examples():
    assert f_project(m(3, c=5)) == m(3, c=5)
    assert f_project(m(2)) == CoeffElem.zero(TOWER)
    assert f_project(CoeffElem.zero(TOWER)) == CoeffElem.zero(TOWER)


def test_phi_star_examples():
    assert phi_star(m(1)) == -m(1)
    assert phi_star(m(0, 1)) == -m(0, 1)
    assert phi_star(m(0)) == m(0)


def test_phi_star_rejects_odd_maslov():
    tw = TowerConfig(2, 6, 6, MonoidSpec(1, (Fraction(1),), (1,), ((1,),)))
    with pytest.raises(OddMaslov):
        phi_star(m(0, 1, tower=tw))


def test_bracket_examples():
    assert bracket_scalar(m(1), m(1)) == m(2, c=2)
    assert bracket_scalar(m(2), m(1)) == CoeffElem.zero(TOWER)
    assert is_central(m(2, 1))
    assert not is_central(m(1))


def test_bracket_rejects_mixed_parity():
    with pytest.raises(NonHomogeneous):
        bracket_scalar(m(1) + m(2), m(1))


def test_degree_and_format():
    x = m(1, 1)
    assert x.degree() == -1 + 2
    with pytest.raises(NonHomogeneous):
        (m(0) + m(1)).degree()
    assert format_coeff(m(2, 1, 0, c=-1)) == "-s^2*T^[1]"
    assert format_coeff(CoeffElem.zero(TOWER)) == "0"


def test_monoid_checks():
    with pytest.raises(ValueError):
        MonoidSpec(1, (Fraction(-1),), (2,), ((1,),))
    bad = MonoidSpec(2, (Fraction(1), Fraction(-1)), (2, 2), ((1, 0), (1, 1)), check=False)
    assert bad.positivity_violations()
