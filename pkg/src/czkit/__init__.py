"""czkit: exact non-doubling Calderon-Zygmund machinery on finite measures.

Everything operates on finitely supported measures in R^d carrying a growth
exponent n, where masses of balls and cubes are step functions of the scale;
all the continuum suprema of the theory (growth constants, maximal operators,
RBMO oscillation, doubling-cube searches) reduce to exact finite enumerations.
"""

from .cubes import (Cube, CubeSearchResult, DeltaCache, DoublingParams,
                    canonical_family, concentric_hull, delta, find_cube_at_delta,
                    is_doubling, k_coeff, scale, smallest_doubling_ancestor)
from .covering import (BesicovichCover, ConcentricSearcher, Generation, Region,
                       WhitneyDecomposition, besicovich_cover, build_generation,
                       pointwise_overlap, whitney_decompose)
from .czdecomp import CZDecomposition, cz_decompose, truncate_sequence
from .mainlemma import (CompanionSet, MainDecomposition, MainParams, companions,
                        decompose_main, phi_kernel, psi_kernel, verify_claims)
from .maximal import (MaximalResult, grand_maximal, grand_maximal_lower,
                      grand_maximal_upper, hl_field, hl_maximal, maximal_field)
from .measure import (DiscreteMeasure, GrowthReport, generate_measure,
                      growth_constant, load_measure, mass_cube, save_measure)
from .spaces import (AtomicBlock, BlockValidation, CanonicalFamily, RbmoEstimate,
                     as_sampled, h1_upper_bound, jn_profile, load_function, mean,
                     rbmo_norm, save_function, validate_atomic_block, z_set)
from . import errors

__all__ = [
    "AtomicBlock", "BesicovichCover", "BlockValidation", "CZDecomposition",
    "CanonicalFamily", "CompanionSet", "ConcentricSearcher", "Cube",
    "CubeSearchResult", "DeltaCache", "DiscreteMeasure", "DoublingParams",
    "Generation", "GrowthReport", "MainDecomposition", "MainParams",
    "MaximalResult", "RbmoEstimate", "Region", "WhitneyDecomposition",
    "as_sampled", "besicovich_cover", "build_generation", "canonical_family",
    "companions", "concentric_hull", "cz_decompose", "decompose_main", "delta",
    "errors", "find_cube_at_delta", "generate_measure", "grand_maximal",
    "grand_maximal_lower", "grand_maximal_upper", "growth_constant",
    "h1_upper_bound", "hl_field", "hl_maximal", "is_doubling", "jn_profile",
    "k_coeff", "load_function", "load_measure", "mass_cube", "maximal_field",
    "mean", "phi_kernel", "pointwise_overlap", "psi_kernel", "rbmo_norm",
    "save_function", "save_measure", "scale", "smallest_doubling_ancestor",
    "truncate_sequence", "validate_atomic_block", "verify_claims",
    "whitney_decompose", "z_set",
]

__version__ = "0.1.0"
