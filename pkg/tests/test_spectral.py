import random
from fractions import Fraction

import pytest

import oracles
from ainfty.algebra import build_algebra
from ainfty.models import formal_sphere, quantum_sphere
from ainfty.spectral import (FilteredComplex, NotDGA, PreconditionFailed, check_page_step,
                             convergence_defect, dr_formula_check, e_infinity, infinity_index, page,
                             real_cell_mask, theorem_oracle, twisted_complex, untwisted_complex)

FS2 = formal_sphere(2).algebra


def svol(alg, c=1):
    return alg.mono("vol", 1, None, None, Fraction(c))


def random_complexes(count, seed, lo=1, hi=8):
    rng = random.Random(seed)
    return [oracles.random_filtered_complex(rng, rng.randint(lo, hi)) for _ in range(count)]


def test_problems_are_reported():
    bad = FilteredComplex(["a", "b", "c"], [0, 1, 2], [1, 0, 0], {0: {1: 1}, 1: {2: 1}})
    msgs = bad.problems()
    assert any("lowers" in m for m in msgs) and any("d^2" in m for m in msgs)
    assert not FilteredComplex(["a", "b"], [0, 1], [0, 1], {0: {1: 2}}).problems()


def test_page_zero_is_associated_graded():
    for fc in random_complexes(20, 11):
        e0 = page(fc, 0).dims()
        want = {}
        for p, h in zip(fc.filt, fc.degrees):
            want[(p, h - p)] = want.get((p, h - p), 0) + 1
        assert e0 == want


def test_page_one_matches_graded_oracle():
    for fc in random_complexes(30, 12):
        assert page(fc, 1).dims() == oracles.e1_dims(fc)


def test_infinity_page_matches_quotients_of_filtered_cohomology():
    for fc in random_complexes(30, 13):
        assert e_infinity(fc).dims() == oracles.graded_cohomology_dims(fc)
        assert not convergence_defect(fc)
        assert fc.cohomology_dims() == oracles.cohomology_dims(fc)


def test_each_page_is_the_homology_of_the_last():
    for fc in random_complexes(25, 14):
        for r in range(0, infinity_index(fc)):
            assert not check_page_step(fc, r)


def test_six_dimensional_example():
    (fc,) = random_complexes(1, 99, 6, 6)
    einf = e_infinity(fc).dims()
    want = oracles.cohomology_dims(fc)
    for h in fc.degree_range():
        assert sum(v for (p, q), v in einf.items() if p + q == h) == want[h]


def test_shift_moves_total_degree():
    for fc in random_complexes(10, 15):
        k = 2
        a, b = e_infinity(fc).dims(), e_infinity(fc.shift(k)).dims()
        assert b == {(p, q - k): v for (p, q), v in a.items()}


def test_mapping_cone_of_identity_is_acyclic():
    for fc in random_complexes(10, 16):
        ident = {j: {j: Fraction(1)} for j in range(len(fc))}
        cone = oracles.mapping_cone(fc, fc, ident)
        assert not cone.problems()
        assert not e_infinity(cone).dims()


def test_mapping_cone_of_zero_map_splits():
    for fa, fb in zip(random_complexes(8, 17), random_complexes(8, 18)):
        cone = oracles.mapping_cone(fa, fb, {})
        got = cone.cohomology_dims()
        ha, hb = fa.cohomology_dims(), fb.cohomology_dims()
        for h, v in got.items():
            assert v == ha.get(h + 1, 0) + hb.get(h, 0)


def test_page_rejects_negative_index():
    with pytest.raises(ValueError):
        page(FilteredComplex([], [], [], {}), -1)


def test_twisted_complex_examples():
    plain = untwisted_complex(FS2)
    zero = twisted_complex(FS2, FS2.zero())
    assert plain.d == zero.d == {}
    fc = twisted_complex(FS2, svol(FS2))
    assert not fc.problems()
    for j, (k, name) in enumerate(fc.labels):
        col = fc.d.get(j, {})
        if name == "e" and k % 2 and k < FS2.tower.s_max:
            assert col == {fc.index((k + 1, "vol")): Fraction(-2)}
        else:
            assert col == {}


@pytest.mark.parametrize("n", [2, 3, 4])
def test_twisted_complex_squares_to_zero(n):
    alg = formal_sphere(n).algebra
    for a in (1, 3, Fraction(-1, 2)):
        assert not twisted_complex(alg, svol(alg, a)).problems()


def test_twisted_complex_needs_a_dga():
    tower = FS2.tower
    alg = build_algebra("m3", tower, [("e", 0), ("vol", 2)], "e",
                        [(("e", "e"), "e", 1), (("vol", "vol", "vol"), "vol", 1)], [("e", "vol", 1), ("vol", "e", 1)])
    with pytest.raises(NotDGA):
        twisted_complex(alg, svol(alg))


def test_dr_formula():
    for n in (2, 3):
        alg = formal_sphere(n).algebra
        rep = dr_formula_check(alg, svol(alg), n - 1)
        assert rep["ok"] and rep["checked"]
        fc = twisted_complex(alg, svol(alg))
        pg = page(fc, n - 1)
        nonzero = any(bool(col) for cols in pg.differential.values() for col in cols)
        assert nonzero == (n % 2 == 0)
    zero = twisted_complex(FS2, FS2.zero())
    for r in range(1, 4):
        assert all(not col for cols in page(zero, r).differential.values() for col in cols)
    with pytest.raises(PreconditionFailed):
        dr_formula_check(FS2, svol(FS2), 2)


@pytest.mark.parametrize("make", [lambda: formal_sphere(2), lambda: formal_sphere(3), lambda: formal_sphere(4),
                                  lambda: quantum_sphere(2)])
def test_sphere_pattern(make):
    alg = make().algebra
    for a in (0, 1, 3):
        b = svol(alg, a) if a else alg.zero()
        rep = theorem_oracle(alg, b)
        assert rep["ok"], rep
        if a and alg.n % 2 == 0:
            assert rep["d_line"] and all(x["multiplier"] == -2 * a for x in rep["d_line"])


def test_real_cell_mask():
    fc = twisted_complex(FS2, svol(FS2))
    mask = real_cell_mask(page(fc, 1), 0)
    assert all((-p) % 4 in (2, 3) for p, q in mask)
    assert mask
