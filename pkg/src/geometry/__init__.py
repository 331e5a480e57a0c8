"""Simplicial meshes, builders and mesh documents."""

from .io import load_mesh, mesh_io, mesh_to_document, save_mesh
from .mesh import (
    Facet,
    FacetSide,
    LinearCongruentialGenerator,
    Mesh,
    build_interval_mesh,
    build_rect_tri_mesh,
    build_two_equilateral_mesh,
)

__all__ = [
    "Facet",
    "FacetSide",
    "Mesh",
    "LinearCongruentialGenerator",
    "build_interval_mesh",
    "build_rect_tri_mesh",
    "build_two_equilateral_mesh",
    "load_mesh",
    "save_mesh",
    "mesh_io",
    "mesh_to_document",
]
