"""Polynomial bases and quadrature on reference simplices."""

from .basis import (
    BasisFamily,
    BasisKind,
    BasisSet,
    ScalarTable,
    VectorTable,
    eval_rt_basis,
    eval_scalar_basis,
    evaluate_monomials,
    facet_trace_basis,
    lattice_nodes,
    monomial_exponents,
    reference_facets,
    rt_basis,
    scalar_basis,
    space_dim,
    vector_basis,
)
from .quadrature import QuadratureRule, quadrature_rule, reference_measure

__all__ = [
    "BasisFamily",
    "BasisKind",
    "BasisSet",
    "ScalarTable",
    "VectorTable",
    "QuadratureRule",
    "space_dim",
    "scalar_basis",
    "vector_basis",
    "rt_basis",
    "facet_trace_basis",
    "eval_scalar_basis",
    "eval_rt_basis",
    "evaluate_monomials",
    "lattice_nodes",
    "monomial_exponents",
    "reference_facets",
    "quadrature_rule",
    "reference_measure",
]
