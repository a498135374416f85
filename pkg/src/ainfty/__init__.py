"""Exact engine for curved cyclic unital A-infinity algebras over a filtered tower."""
from .coeff import (CoeffElem, FormalVarSpec, MonoidSpec, NonHomogeneous, OddMaslov, TowerConfig,
                    bracket_scalar, f_project, is_central, mul, nu, nu_s, parity_split, phi_star)
from .algebra import (AInftyAlgebra, ArityOverflow, BadModel, Element, GradedBasis, NotInvolution,
                      a_infty_defect, check_axioms, cyclic_structure_defect, eval_mk, opposite,
                      pairing_F, self_dual_defect)

__version__ = "0.1.0"
