from fractions import Fraction

import pytest

import oracles
from ainfty.coeff import CoeffElem, parity_split
from ainfty.deform import NotBounding
from ainfty.invariants import NotUnitPair, ogw_extract, reduce_mod_odd_square, rho, superpotential
from ainfty.mcsolve import solve_point_like
from ainfty.models import formal_sphere, obstructed_fixture, quantum_sphere

QS = quantum_sphere(2).algebra


def svol(alg, c=1):
    return alg.mono("vol", 1, None, None, Fraction(c))


def mono(tower, s_pow, beta, c=1):
    return CoeffElem.monomial(tower, s_pow, tuple(beta), (0,) * tower.vars.count, Fraction(c))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_formal_sphere_superpotential_vanishes(n):
    alg = formal_sphere(n).algebra
    for a in (1, -2, Fraction(3, 5)):
        assert not superpotential(alg, svol(alg, a)).value


@pytest.mark.parametrize("a0", [1, 2, -3, Fraction(1, 2)])
def test_quantum_sphere_superpotential(a0):
    a0 = Fraction(a0)
    omega = superpotential(QS, svol(QS, a0))
    assert omega.value == mono(QS.tower, 3, (1,), a0 ** 3 / 3)
    assert omega.value == mono(QS.tower, 3, (1,), oracles.quantum_sphere_superpotential_k2(2, a0))
    assert ogw_extract(omega, [1], 3) == 2 * a0 ** 3
    assert not parity_split(omega.value)[0]


def test_superpotential_of_zero():
    assert not superpotential(QS, QS.zero()).value


def test_superpotential_requires_bounding_cochain():
    ob = obstructed_fixture().algebra
    with pytest.raises(NotBounding):
        superpotential(ob, svol(ob))


def test_ogw_extract_edge_cases():
    omega = superpotential(QS, svol(QS))
    assert ogw_extract(omega, [1], QS.tower.s_max + 1) == 0
    assert ogw_extract(omega, [0], 3) == 0
    zero = superpotential(QS, QS.zero())
    assert ogw_extract(zero, [1], 3) == 0


def test_rho_examples():
    tag, unit, even = rho(QS, "0", svol(QS))
    assert tag == "0" and unit == CoeffElem.scalar(QS.tower, 1) and not even
    b = svol(QS) + QS.mono("vol", 2, (1,))
    assert rho(QS, "0", b)[2] == mono(QS.tower, 2, (1,))
    with pytest.raises(NotUnitPair):
        rho(QS, "0", QS.mono("e", 3, (1,)))


def test_rho_of_solver_output_matches_report():
    rep = solve_point_like(QS, mono(QS.tower, 1, (0,)))
    assert rep.rho == rho(QS, QS.gamma_tag, rep.b)


def test_reduce_mod_odd_square():
    tw = QS.tower
    assert reduce_mod_odd_square(mono(tw, 2, (2,))) == CoeffElem.zero(tw)
    assert reduce_mod_odd_square(mono(tw, 2, (1,))) == mono(tw, 2, (1,))
    assert reduce_mod_odd_square(mono(tw, 0, (2,))) == mono(tw, 0, (2,))
