"""Hybridized methods: local solvers, flux closures, condensation and Newton."""

from .assembly import (
    BlockIndexMap,
    CellBlocks,
    DiscreteSolution,
    HdgProblem,
    assemble_blocks,
    assemble_residual_jacobian,
    global_jacobian,
    global_residual,
    source_vector,
)
from .condensation import CondensedOperator, StaticCondensation, condense_schur
from .element import ElementData, FacetData, quadrature_degrees, tabulate_element
from .flux import FacetFlux, build_facet_flux, flux_sigma_hat
from .methods import (
    FAMILY_ALIASES,
    FluxMode,
    MethodFamily,
    MethodSpec,
    parse_family,
    two_sided_penalty,
)
from .solver import (
    boundary_data_from_function,
    linearized_solve,
    newton_solve,
    random_boundary_data,
    resolve_boundary_data,
    solve,
)
from .spaces import HatKind, LocalSpaces, TraceLayout, build_trace_layout, local_space_table

__all__ = [
    # Methods and spaces
    "MethodFamily",
    "MethodSpec",
    "FluxMode",
    "FAMILY_ALIASES",
    "parse_family",
    "two_sided_penalty",
    "LocalSpaces",
    "HatKind",
    "TraceLayout",
    "local_space_table",
    "build_trace_layout",

    # Elements and fluxes
    "ElementData",
    "FacetData",
    "FacetFlux",
    "tabulate_element",
    "quadrature_degrees",
    "build_facet_flux",
    "flux_sigma_hat",

    # Assembly and solution
    "HdgProblem",
    "DiscreteSolution",
    "BlockIndexMap",
    "CellBlocks",
    "assemble_blocks",
    "assemble_residual_jacobian",
    "global_residual",
    "global_jacobian",
    "source_vector",
    "StaticCondensation",
    "CondensedOperator",
    "condense_schur",
    "solve",
    "newton_solve",
    "linearized_solve",
    "random_boundary_data",
    "boundary_data_from_function",
    "resolve_boundary_data",
]
