"""Multisymplecticity verification: variations, pairings and conservation residuals."""

from .conservativity import ConservativityResult, conservativity_jump, trace_identification_residual
from .counterexample import cgh_counterexample, expected_edge_forms, expected_w_map, wedge
from .identities import (
    IdentityKind,
    ReciprocityResult,
    TestField,
    continuum_identity_check,
    discrete_reciprocity_residual,
)
from .pairing import (
    LocalResult,
    PairingMatrix,
    StrongEntry,
    additivity_residual,
    boundary_pairing,
    facet_pairing,
    inf_norm,
    jump_identity_residual,
    local_mscl_residual,
    sample_regions,
    strong_mscl_residual,
    weak_mscl_residual,
)
from .variations import VariationSet, tangent_variations, variation_labels

__all__ = [
    # Variations and pairings
    "VariationSet",
    "tangent_variations",
    "variation_labels",
    "PairingMatrix",
    "StrongEntry",
    "LocalResult",
    "boundary_pairing",
    "facet_pairing",
    "inf_norm",
    "sample_regions",

    # Residuals
    "local_mscl_residual",
    "strong_mscl_residual",
    "weak_mscl_residual",
    "jump_identity_residual",
    "additivity_residual",
    "conservativity_jump",
    "ConservativityResult",
    "trace_identification_residual",

    # Identities
    "IdentityKind",
    "TestField",
    "ReciprocityResult",
    "continuum_identity_check",
    "discrete_reciprocity_residual",

    # CG_H counterexample
    "cgh_counterexample",
    "expected_w_map",
    "expected_edge_forms",
    "wedge",
]
