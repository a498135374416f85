"""Spectral sequences of bounded filtered cochain complexes, and twisted sphere complexes."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .algebra import AInftyAlgebra, Element, eval_unchecked, integral
from .deform import graded_bracket


class NotCentralCurvature(ValueError):
    def __init__(self, msg, value=None):
        super().__init__(msg)
        self.value = value


class NotDGA(ValueError):
    pass


class PreconditionFailed(ValueError):
    pass


class Mismatch(AssertionError):
    def __init__(self, msg, bidegree=None):
        super().__init__(msg)
        self.bidegree = bidegree


@dataclass
class FilteredComplex:
    """Basis vectors with degree and filtration value; ``d[j]`` is the column of d on vector j."""
    labels: list
    degrees: list
    filt: list
    d: dict

    def __post_init__(self):
        self.d = {j: {i: Fraction(c) for i, c in col.items() if c} for j, col in self.d.items()}
        self._index = {lab: i for i, lab in enumerate(self.labels)}

    def __len__(self):
        return len(self.labels)

    def index(self, label) -> int:
        return self._index[label]

    def apply(self, x: dict) -> dict:
        out: dict = {}
        for j, c in x.items():
            out = linalg.vadd(out, self.d.get(j, {}), c)
        return out

    def problems(self) -> list:
        bad = []
        for j, col in self.d.items():
            for i in col:
                if self.degrees[i] != self.degrees[j] + 1:
                    bad.append(f"d({self.labels[j]}) has a component of the wrong degree")
                if self.filt[i] < self.filt[j]:
                    bad.append(f"d({self.labels[j]}) lowers the filtration")
            if self.apply(col):
                bad.append(f"d^2({self.labels[j]}) != 0")
        return bad

    def degree_range(self) -> range:
        if not self.degrees:
            return range(0)
        return range(min(self.degrees), max(self.degrees) + 1)

    def filt_range(self) -> tuple:
        return (min(self.filt), max(self.filt)) if self.filt else (0, 0)

    def span_length(self) -> int:
        lo, hi = self.filt_range()
        return hi - lo

    def shift(self, k: int) -> "FilteredComplex":
        """A[k]: (A[k])^h = A^{h+k}."""
        return FilteredComplex(list(self.labels), [d - k for d in self.degrees], list(self.filt), dict(self.d))

    def cohomology_dims(self) -> dict:
        out = {}
        for h in self.degree_range():
            src = [i for i, d in enumerate(self.degrees) if d == h]
            prev = [i for i, d in enumerate(self.degrees) if d == h - 1]
            ker = len(linalg.kernel([self.d.get(i, {}) for i in src]))
            im = linalg.rank([self.d.get(i, {}) for i in prev])
            out[h] = ker - im
        return out


@dataclass
class Cell:
    dim: int
    reps: list          # vectors (dict index -> Fraction) lifting a basis of E_r^{p,q}
    denominator: list   # basis of Z_{r-1}^{p+1} + B_{r-1}^p


@dataclass
class SSPage:
    r: int
    cells: dict                      # (p, q) -> Cell
    differential: dict = field(default_factory=dict)   # (p, q) -> list of columns (dict rep index -> coeff)

    def dims(self) -> dict:
        return {pq: c.dim for pq, c in self.cells.items() if c.dim}

    def dim(self, p, q) -> int:
        c = self.cells.get((p, q))
        return c.dim if c else 0

    def to_json(self, fc: FilteredComplex | None = None) -> dict:
        cells = []
        for (p, q), c in sorted(self.cells.items()):
            if not c.dim:
                continue
            entry = {"p": p, "q": q, "dim": c.dim}
            if fc is not None:
                entry["reps"] = [sorted(_label_str(fc.labels[i]) for i in rep) for rep in c.reps]
            cells.append(entry)
        return {"r": self.r, "cells": cells}


def _label_str(lab) -> str:
    return lab if isinstance(lab, str) else "/".join(str(x) for x in lab)


def _sub(fc: FilteredComplex, h: int, pmin) -> list:
    return [i for i, d in enumerate(fc.degrees) if d == h and fc.filt[i] >= pmin]


def z_space(fc: FilteredComplex, p: int, r: int, h: int, rule: str = "lex") -> list:
    """Z_r^p in degree h: x ∈ F^p with dx ∈ F^{p+r}."""
    idx = _sub(fc, h, p)
    cols = [{i: c for i, c in fc.d.get(j, {}).items() if fc.filt[i] < p + r} for j in idx]
    return [{idx[j]: c for j, c in v.items()} for v in linalg.kernel(cols, rule)]


def b_space(fc: FilteredComplex, p: int, r: int, h: int) -> list:
    """B_r^p in degree h: F^p ∩ d(F^{p-r})."""
    idx = _sub(fc, h - 1, p - r)
    cols = [{i: c for i, c in fc.d.get(j, {}).items() if fc.filt[i] < p} for j in idx]
    out = []
    for v in linalg.kernel(cols):
        y = fc.apply({idx[j]: c for j, c in v.items()})
        if y:
            out.append(y)
    return linalg.span_basis(out)


def _cell(fc: FilteredComplex, p: int, q: int, r: int, rule: str) -> Cell:
    h = p + q
    num = z_space(fc, p, r, h, rule)
    den = linalg.span_basis(z_space(fc, p + 1, r - 1, h, rule) + b_space(fc, p, r - 1, h))
    ech = linalg.Echelon()
    for v in den:
        ech.add(v)
    reps = []
    for v in num:
        if ech.add(v):
            reps.append(v)
    return Cell(len(reps), reps, den)


def class_coordinates(cell: Cell, y: dict):
    """Coordinates of y in the cell's representative basis, modulo its denominator."""
    cols = list(cell.denominator) + list(cell.reps)
    if not y:
        return [Fraction(0)] * cell.dim
    x = linalg.solve(cols, y, "lex")
    if x is None:
        return None
    off = len(cell.denominator)
    return [x.get(off + i, Fraction(0)) for i in range(cell.dim)]


def page(fc: FilteredComplex, r: int, rule: str = "lex") -> SSPage:
    if r < 0:
        raise ValueError("page index must be non-negative")
    lo, hi = fc.filt_range()
    cells = {}
    for h in fc.degree_range():
        for p in range(lo, hi + 1):
            cells[(p, h - p)] = _cell(fc, p, h - p, r, rule)
    pg = SSPage(r, cells)
    for (p, q), c in cells.items():
        cols = []
        tgt = cells.get((p + r, q - r + 1))
        for rep in c.reps:
            y = fc.apply(rep)
            if tgt is None:
                if y:
                    raise AssertionError("d_r leaves the computed range")
                cols.append({})
                continue
            coords = class_coordinates(tgt, y)
            if coords is None:
                raise AssertionError(f"d of a Z_r representative is not in Z_r at {(p + r, q - r + 1)}")
            cols.append({i: v for i, v in enumerate(coords) if v})
        pg.differential[(p, q)] = cols
    return pg


def infinity_index(fc: FilteredComplex) -> int:
    return fc.span_length() + 2


def e_infinity(fc: FilteredComplex, rule: str = "lex") -> SSPage:
    return page(fc, infinity_index(fc), rule)


def page_homology_dims(pg: SSPage) -> dict:
    """dim H(E_r, d_r) at every bidegree."""
    out = {}
    r = pg.r
    for (p, q), c in pg.cells.items():
        outgoing = linalg.rank(pg.differential.get((p, q), []))
        src = (p - r, q + r - 1)
        incoming = linalg.rank(pg.differential.get(src, []))
        out[(p, q)] = c.dim - outgoing - incoming
    return out


def check_page_step(fc: FilteredComplex, r: int) -> list:
    cur, nxt = page(fc, r), page(fc, r + 1)
    hom = page_homology_dims(cur)
    return [pq for pq in cur.cells if hom[pq] != nxt.dim(*pq)]


def convergence_defect(fc: FilteredComplex) -> dict:
    einf = e_infinity(fc)
    h_dims = fc.cohomology_dims()
    bad = {}
    for h, dh in h_dims.items():
        total = sum(einf.dim(p, h - p) for p in range(fc.filt_range()[0], fc.filt_range()[1] + 1))
        if total != dh:
            bad[h] = (total, dh)
    return bad


def real_cell_mask(pg: SSPage, v: int) -> list:
    """Cells with -p - v ≡ 2, 3 (mod 4): the parity filter for the real sequence."""
    return sorted(pq for pq, c in pg.cells.items() if c.dim and (-pq[0] - v) % 4 in (2, 3))


# ----------------------------------------------------------------------------
# twisted complexes of the residue dga
# ----------------------------------------------------------------------------

def residue_is_dga(alg: AInftyAlgebra) -> bool:
    for k, table in alg.ops.items():
        if k in (1, 2):
            continue
        for vals in table.values():
            for (w, beta, t), c in vals:
                if alg.tower.key_nu((0, beta, t)) == 0:
                    return False
    return True


def twisted_complex(alg: AInftyAlgebra, b: Element, drop_unit: bool = True, s_max=None) -> FilteredComplex:
    """S ⊗ (residue of C) with d_twist = d − [b̄, ·] and the ν_S filtration p = k(n−1)."""
    if not residue_is_dga(alg):
        raise NotDGA("residue has operations beyond m_1 and m_2")
    tw = alg.tower
    n = tw.n
    K = tw.s_max if s_max is None else s_max
    bbar = b.residue().filter(lambda key: key[1] <= K)
    unit = alg.basis.unit_index

    def dropped(k, v):
        return drop_unit and v == unit and (k * (n - 1)) % 2 == 0

    labels, degs, filt = [], [], []
    for k in range(K + 1):
        for v, dv in enumerate(alg.basis.degrees):
            if dropped(k, v):
                continue
            labels.append((k, alg.basis.names[v]))
            degs.append(k * (1 - n) + dv)
            filt.append(k * (n - 1))
    index = {lab: i for i, lab in enumerate(labels)}

    def dtw(x: Element) -> Element:
        return eval_unchecked(alg, [x]).residue() - graded_bracket(alg, bbar, x)

    # curvature precondition: db − [b,b]/2 must commute with everything
    if bbar:
        kappa = eval_unchecked(alg, [bbar]).residue() - graded_bracket(alg, bbar, bbar).scale(Fraction(1, 2))
        for k in range(K + 1):
            for v in range(len(alg.basis)):
                br = graded_bracket(alg, kappa, alg.mono(v, k)) if kappa else None
                if br:
                    raise NotCentralCurvature("db - [b,b]/2 is not central", kappa)
    d = {}
    for j, (k, name) in enumerate(labels):
        y = dtw(alg.mono(name, k))
        col = {}
        for key, c in y.terms.items():
            v, p = key[0], key[1]
            if p > K or dropped(p, v):
                continue
            col[index[(p, alg.basis.names[v])]] = c
        if col:
            d[j] = col
    return FilteredComplex(labels, degs, filt, d)


def untwisted_complex(alg: AInftyAlgebra, drop_unit: bool = True, s_max=None) -> FilteredComplex:
    return twisted_complex(alg, alg.zero(), drop_unit, s_max)


def dr_formula_check(alg: AInftyAlgebra, b: Element, ell: int, drop_unit: bool = True) -> dict:
    """Compare the engine's d_ℓ with −[[b̄], ·] on representatives."""
    n = alg.tower.n
    bbar = b.residue()
    if any(key[1] * (n - 1) != ell for key in bbar.terms):
        raise PreconditionFailed(f"b is not concentrated in filtration {ell}")
    if eval_unchecked(alg, [bbar]).residue():
        raise PreconditionFailed("b is not closed")
    fc = twisted_complex(alg, b, drop_unit)
    pg = page(fc, ell)
    checked = 0
    mismatches = []
    for (p, q), cell in pg.cells.items():
        tgt = pg.cells.get((p + ell, q - ell + 1))
        for i, rep in enumerate(cell.reps):
            x = _vector_to_element(alg, fc, rep)
            y = _element_to_vector(fc, -graded_bracket(alg, bbar, x), drop_unit, alg) if bbar else {}
            want = class_coordinates(tgt, y) if tgt is not None else ([] if not y else None)
            got = pg.differential[(p, q)][i]
            checked += 1
            if want is None or {j: v for j, v in enumerate(want) if v} != got:
                mismatches.append({"p": p, "q": q, "rep": i})
    return {"ok": not mismatches, "ell": ell, "checked": checked, "mismatches": mismatches}


def _vector_to_element(alg: AInftyAlgebra, fc: FilteredComplex, vec: dict) -> Element:
    terms = {}
    for i, c in vec.items():
        k, name = fc.labels[i]
        terms[(alg.basis.index(name), k, alg.tower.monoid.zero(), (0,) * alg.tower.vars.count)] = c
    return Element(alg.tower, alg.basis, terms)


def _element_to_vector(fc: FilteredComplex, x: Element, drop_unit: bool, alg: AInftyAlgebra) -> dict:
    out = {}
    for key, c in x.terms.items():
        lab = (key[1], alg.basis.names[key[0]])
        if lab in fc._index:
            out[fc.index(lab)] = c
    return out


# ----------------------------------------------------------------------------
# the sphere pattern
# ----------------------------------------------------------------------------

def sphere_cohomology(alg: AInftyAlgebra) -> dict:
    """Residue cohomology dimensions of the base algebra by degree."""
    degs = alg.basis.degrees
    zero = alg.zero()
    out = {}
    for h in sorted(set(degs)):
        src = [v for v, d in enumerate(degs) if d == h]
        prev = [v for v, d in enumerate(degs) if d == h - 1]

        def col(v):
            y = eval_unchecked(alg, [alg.vec(v)]).residue()
            return {key[0]: c for key, c in y.terms.items()} if y != zero else {}
        ker = len(linalg.kernel([col(v) for v in src]))
        im = linalg.rank([col(v) for v in prev])
        out[h] = ker - im
    return out


def theorem_oracle(alg: AInftyAlgebra, b: Element) -> dict:
    """Check E_1 and E_∞ of the twisted sphere complex against the expected pattern."""
    tw = alg.tower
    n = tw.n
    fc = twisted_complex(alg, b)
    e1 = page(fc, 1)
    einf = e_infinity(fc)
    hcoh = sphere_cohomology(alg)
    a = integral(alg, b.residue())
    a_scalar = a.terms.get((1, tw.monoid.zero(), (0,) * tw.vars.count), Fraction(0))
    twisted = n % 2 == 0 and a_scalar != 0
    window = [k * (n - 1) for k in range(tw.s_max)]
    e1_bad, einf_bad = [], []
    for p in window:
        for f in sorted(hcoh):
            q = f - 2 * p
            want1 = hcoh[f] - (1 if (p % 2 == 0 and f == 0) else 0)
            if e1.dim(p, q) != want1:
                e1_bad.append((p, q, e1.dim(p, q), want1))
            if twisted and (f == 0 or (p % 2 == 0 and p >= 2 and f == n)):
                want = 0
            else:
                want = want1
            if einf.dim(p, q) != want:
                einf_bad.append((p, q, einf.dim(p, q), want))
    line = []
    if twisted:
        r = n - 1
        pr = page(fc, r)
        vol = alg.basis.names[alg.vol_index()]
        for k in range(1, tw.s_max, 2):
            src_lab, tgt_lab = (k, alg.basis.names[alg.basis.unit_index]), (k + 1, vol)
            if src_lab not in fc._index or tgt_lab not in fc._index:
                continue
            p = k * (n - 1)
            q = k * (1 - n) - p
            cell, tgt = pr.cells[(p, q)], pr.cells.get((p + r, q - r + 1))
            if not cell.dim or tgt is None or not tgt.dim:
                continue
            alpha = cell.reps[0].get(fc.index(src_lab), Fraction(0))
            beta = tgt.reps[0].get(fc.index(tgt_lab), Fraction(0))
            coeff = pr.differential[(p, q)][0].get(0, Fraction(0))
            line.append({"k": k, "multiplier": coeff * beta / alpha})
    ok = not e1_bad and not einf_bad and all(x["multiplier"] == -2 * a_scalar for x in line)
    return {"ok": ok, "n": n, "integral": a_scalar, "twisted": twisted, "e1_mismatch": e1_bad,
            "einf_mismatch": einf_bad, "d_line": line, "window": window}
