"""Exact twisted tensor products, homological perturbation and torsion over the rationals."""
from .chains import (
    ChainComplex,
    ChainHomotopy,
    ChainMap,
    GradedMap,
    betti_list,
    betti_numbers,
    euler_characteristic,
    homology,
    mapping_cone,
    mapping_cylinder,
)
from .exactq import QMatrix, parse_rational
from .fibration import MonodromyRep, fibration_complex, is_unipotent
from .simplicial import ReducedSimplicialSet, model, normalized_chains
from .torsion import BasedComplex, torsion
from .twisting import TwistingCochain, twisted_tensor, verify_twisting

__version__ = "0.1.0"
