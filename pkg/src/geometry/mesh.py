"""
Simplicial meshes in one and two dimensions with derived facet topology.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import MeshError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FacetSide:
    """One incident (cell, local facet) reference of a facet."""
    cell: int
    local_facet: int
    normal: np.ndarray


@dataclass(frozen=True, eq=False)
class Facet:
    """A mesh facet: an edge in 2-D, a point in 1-D."""
    vertices: Tuple[int, ...]
    measure: float
    side_plus: FacetSide
    side_minus: Optional[FacetSide] = None

    @property
    def is_boundary(self) -> bool:
        return self.side_minus is None

    @property
    def sides(self) -> Tuple[FacetSide, ...]:
        if self.side_minus is None:
            return (self.side_plus,)
        return (self.side_plus, self.side_minus)


@dataclass(frozen=True, eq=False)
class Mesh:
    """
    Immutable simplicial mesh.

    Local facet j of a cell is the facet opposite its local vertex j. Facets are
    numbered in order of first appearance while sweeping cells and local facets,
    so the plus side of an internal facet is the incident cell with smaller id.
    """
    dim: int
    vertices: np.ndarray
    cells: np.ndarray
    facets: Tuple[Facet, ...]
    cell_facets: np.ndarray
    boundary_facet_ids: Tuple[int, ...] = field(default=())

    @classmethod
    def from_arrays(cls, dim: int, vertices: Sequence[Sequence[float]], cells: Sequence[Sequence[int]]) -> "Mesh":
        """Validate vertex/cell tables and derive facets, normals and measures."""
        if dim not in (1, 2):
            raise ValidationError(f"unsupported mesh dimension {dim}", field="dim", value=dim)

        vertex_array = np.array(vertices, dtype=float).reshape(-1, dim)
        cell_array = np.array(cells, dtype=np.int64).reshape(-1, dim + 1)

        if not np.all(np.isfinite(vertex_array)):
            raise ValidationError("vertex coordinates must be finite", field="vertices")
        if cell_array.shape[0] == 0:
            raise ValidationError("mesh has no cells", field="cells")
        if cell_array.min() < 0 or cell_array.max() >= vertex_array.shape[0]:
            raise ValidationError("vertex index out of range", field="cells")

        for cell_id, cell in enumerate(cell_array):
            volume = _signed_volume(vertex_array[cell])
            if not volume > 0.0:
                raise MeshError(
                    f"cell {cell_id} is degenerate or inverted (signed volume {volume:.3e})",
                    cell_id=cell_id,
                )

        facets, cell_facets = _derive_facets(dim, vertex_array, cell_array)
        boundary = tuple(i for i, facet in enumerate(facets) if facet.is_boundary)

        vertex_array.flags.writeable = False
        cell_array.flags.writeable = False
        cell_facets.flags.writeable = False

        return cls(
            dim=dim,
            vertices=vertex_array,
            cells=cell_array,
            facets=tuple(facets),
            cell_facets=cell_facets,
            boundary_facet_ids=boundary,
        )

    @property
    def n_cells(self) -> int:
        return int(self.cells.shape[0])

    @property
    def n_facets(self) -> int:
        return len(self.facets)

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def internal_facet_ids(self) -> Tuple[int, ...]:
        return tuple(i for i, facet in enumerate(self.facets) if not facet.is_boundary)

    def cell_vertices(self, cell_id: int) -> np.ndarray:
        return self.vertices[self.cells[cell_id]]

    def affine_map(self, cell_id: int) -> Tuple[np.ndarray, np.ndarray]:
        """Origin x0 and Jacobian J with x = x0 + J xi on the reference simplex."""
        corners = self.cell_vertices(cell_id)
        origin = corners[0]
        jacobian = (corners[1:] - origin).T
        return origin, jacobian

    def volume(self, cell_id: int) -> float:
        return _signed_volume(self.cell_vertices(cell_id))

    def facet_points(self, facet_id: int, t: np.ndarray) -> np.ndarray:
        """Physical points of a facet for parameters t in [0, 1] (ignored in 1-D)."""
        facet = self.facets[facet_id]
        if self.dim == 1:
            return np.repeat(self.vertices[facet.vertices[0]][None, :], len(t), axis=0)
        start = self.vertices[facet.vertices[0]]
        end = self.vertices[facet.vertices[1]]
        return start[None, :] + np.asarray(t)[:, None] * (end - start)[None, :]

    def neighbors(self, cell_id: int) -> List[int]:
        """Cells sharing a facet with the given cell."""
        result = []
        for facet_id in self.cell_facets[cell_id]:
            for side in self.facets[facet_id].sides:
                if side.cell != cell_id:
                    result.append(side.cell)
        return result

    def side_of(self, facet_id: int, cell_id: int) -> FacetSide:
        for side in self.facets[facet_id].sides:
            if side.cell == cell_id:
                return side
        raise MeshError(f"cell {cell_id} is not incident to facet {facet_id}", cell_id=cell_id)

    def total_volume(self) -> float:
        return float(sum(self.volume(c) for c in range(self.n_cells)))

    def describe(self) -> Dict[str, int]:
        return {
            "dim": self.dim,
            "vertices": self.n_vertices,
            "cells": self.n_cells,
            "facets": self.n_facets,
            "internal_facets": len(self.internal_facet_ids),
        }


def _signed_volume(corners: np.ndarray) -> float:
    edges = corners[1:] - corners[0]
    return float(np.linalg.det(edges)) / math.factorial(edges.shape[0])


def _derive_facets(dim: int, vertices: np.ndarray, cells: np.ndarray) -> Tuple[List[Facet], np.ndarray]:
    n_cells = cells.shape[0]
    cell_facets = np.empty((n_cells, dim + 1), dtype=np.int64)
    index: Dict[Tuple[int, ...], int] = {}
    sides: List[List[FacetSide]] = []
    keys: List[Tuple[int, ...]] = []

    for cell_id, cell in enumerate(cells):
        for local in range(dim + 1):
            others = [int(v) for k, v in enumerate(cell) if k != local]
            key = tuple(sorted(others))
            normal = _outward_normal(vertices, others, int(cell[local]))
            side = FacetSide(cell=cell_id, local_facet=local, normal=normal)
            if key in index:
                facet_id = index[key]
                if len(sides[facet_id]) == 2:
                    raise MeshError(f"facet {key} shared by more than two cells", cell_id=cell_id)
                sides[facet_id].append(side)
            else:
                facet_id = len(keys)
                index[key] = facet_id
                keys.append(key)
                sides.append([side])
            cell_facets[cell_id, local] = facet_id

    facets = []
    for key, facet_sides in zip(keys, sides):
        if dim == 1:
            measure = 1.0
        else:
            measure = float(np.linalg.norm(vertices[key[1]] - vertices[key[0]]))
        facets.append(
            Facet(
                vertices=key,
                measure=measure,
                side_plus=facet_sides[0],
                side_minus=facet_sides[1] if len(facet_sides) > 1 else None,
            )
        )
    return facets, cell_facets


def _outward_normal(vertices: np.ndarray, facet_vertices: List[int], opposite: int) -> np.ndarray:
    if len(facet_vertices) == 1:
        direction = vertices[facet_vertices[0]] - vertices[opposite]
        normal = np.sign(direction).astype(float)
    else:
        tangent = vertices[facet_vertices[1]] - vertices[facet_vertices[0]]
        normal = np.array([tangent[1], -tangent[0]]) / np.linalg.norm(tangent)
        if np.dot(normal, vertices[facet_vertices[0]] - vertices[opposite]) < 0.0:
            normal = -normal
    normal.flags.writeable = False
    return normal


class LinearCongruentialGenerator:
    """
    Portable pseudo-random stream for mesh perturbation.

    state <- (1664525 * state + 1013904223) mod 2**32, output state / 2**32.
    """

    MULTIPLIER = 1664525
    INCREMENT = 1013904223
    MODULUS = 2 ** 32

    def __init__(self, seed: int):
        self.state = int(seed) % self.MODULUS

    def next_float(self) -> float:
        self.state = (self.MULTIPLIER * self.state + self.INCREMENT) % self.MODULUS
        return self.state / self.MODULUS


def build_interval_mesh(a: float, b: float, n_cells: int) -> Mesh:
    """Uniform partition of [a, b]."""
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValidationError("interval bounds must be finite", field="bounds", value=(a, b))
    if a >= b:
        raise ValidationError("interval requires a < b", field="bounds", value=(a, b))
    if n_cells < 1:
        raise ValidationError("n_cells must be positive", field="n_cells", value=n_cells)

    points = np.linspace(a, b, n_cells + 1)
    cells = [(i, i + 1) for i in range(n_cells)]
    logger.debug(f"Built interval mesh [{a}, {b}] with {n_cells} cells")
    return Mesh.from_arrays(1, points[:, None], cells)


def build_rect_tri_mesh(
    x_extent: Tuple[float, float],
    y_extent: Tuple[float, float],
    nx: int,
    ny: int,
    perturb: float = 0.0,
    seed: int = 0,
) -> Mesh:
    """Triangulated grid, each square split along its (i,j)-(i+1,j+1) diagonal."""
    x0, x1 = float(x_extent[0]), float(x_extent[1])
    y0, y1 = float(y_extent[0]), float(y_extent[1])
    if not all(math.isfinite(v) for v in (x0, x1, y0, y1)) or x1 <= x0 or y1 <= y0:
        raise ValidationError("rectangle extents must be finite and positive", field="extent")
    if nx < 1 or ny < 1:
        raise ValidationError("nx and ny must be positive", field="nx/ny", value=(nx, ny))
    if not 0.0 <= perturb < 0.3:
        raise ValidationError("perturb must lie in [0, 0.3)", field="perturb", value=perturb)

    dx = (x1 - x0) / nx
    dy = (y1 - y0) / ny
    local_edge = min(dx, dy)
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)

    vertices = np.array([[xs[i], ys[j]] for j in range(ny + 1) for i in range(nx + 1)])

    if perturb > 0.0:
        rng = LinearCongruentialGenerator(seed)
        amplitude = perturb * local_edge / math.sqrt(2.0)
        for j in range(1, ny):
            for i in range(1, nx):
                k = j * (nx + 1) + i
                vertices[k, 0] += amplitude * (2.0 * rng.next_float() - 1.0)
                vertices[k, 1] += amplitude * (2.0 * rng.next_float() - 1.0)

    cells = []
    for j in range(ny):
        for i in range(nx):
            a = j * (nx + 1) + i
            b = a + 1
            c = a + (nx + 1) + 1
            d = a + (nx + 1)
            cells.append((a, b, c))
            cells.append((a, c, d))

    logger.debug(f"Built {nx}x{ny} triangulated rectangle (perturb={perturb}, seed={seed})")
    return Mesh.from_arrays(2, vertices, cells)


def build_two_equilateral_mesh() -> Mesh:
    """Two equilateral triangles with edge sqrt(2) sharing the edge {u2, u3}."""
    half_width = math.sqrt(1.5)
    half_height = math.sqrt(2.0) / 2.0
    vertices = [
        (-half_width, 0.0),
        (0.0, -half_height),
        (0.0, half_height),
        (half_width, 0.0),
    ]
    cells = [(0, 1, 2), (1, 3, 2)]
    return Mesh.from_arrays(2, vertices, cells)
