"""
Local spaces per method family and the global numbering of trace unknowns.

Local unknowns of a cell are ordered [u, sigma, sigma_hat], each block
component-major (index i * N + k for field i and basis function k). Residual
rows are ordered [flux equation (tested by Sigma), balance equation (tested
by V), flux condition (tested by Sigma_hat)].
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..errors import MethodError
from ..geometry import Mesh
from ..polyspace import (
    BasisFamily,
    BasisKind,
    BasisSet,
    facet_trace_basis,
    lattice_nodes,
    rt_basis,
    scalar_basis,
    vector_basis,
)
from .methods import FluxMode, MethodFamily, MethodSpec

logger = logging.getLogger(__name__)


class HatKind:
    """Representations of the flux unknowns for CG_H and NC_H."""
    BOUNDARY_TRACE = "boundary_trace"
    FACETWISE = "facetwise"


# (V degree offset, Sigma degree offset, Sigma kind, trace degree offset)
_FAMILY_TABLE: Dict[MethodFamily, Tuple[int, int, BasisKind, int]] = {
    MethodFamily.RT_H: (0, 0, BasisKind.RT, 0),
    MethodFamily.BDM_H: (-1, 0, BasisKind.P_VECTOR, 0),
    MethodFamily.LDG_H_A: (-1, 0, BasisKind.P_VECTOR, 0),
    MethodFamily.LDG_H_B: (0, 0, BasisKind.P_VECTOR, 0),
    MethodFamily.LDG_H_C: (0, -1, BasisKind.P_VECTOR, 0),
    MethodFamily.CG_H: (0, -1, BasisKind.P_VECTOR, 0),
    MethodFamily.NC_H: (0, -1, BasisKind.P_VECTOR, -1),
    MethodFamily.IP_H: (0, 0, BasisKind.P_VECTOR, 0),
    MethodFamily.IP_H_LIKE: (0, -1, BasisKind.P_VECTOR, 0),
}


@dataclass(frozen=True, eq=False)
class LocalSpaces:
    """Bases and dimensions of V(K), Sigma(K), Sigma_hat(dK) and the facet trace space."""
    family: MethodFamily
    degree: int
    m: int
    n: int
    flux_mode: FluxMode
    v_degree: int
    sigma_degree: int
    sigma_kind: BasisKind
    trace_degree: int
    v_basis: BasisSet
    sigma_basis: BasisSet
    trace_basis: BasisSet
    hat_kind: Optional[str] = None
    hat_facet_basis: Optional[BasisSet] = None

    @property
    def dim_v(self) -> int:
        return self.v_basis.size

    @property
    def dim_sigma(self) -> int:
        return self.sigma_basis.size

    @property
    def dim_trace(self) -> int:
        """Facet trace space dimension per field component."""
        return self.trace_basis.size

    @property
    def hat_indices(self) -> np.ndarray:
        """V(K) basis functions whose boundary traces span Sigma_hat(dK) for CG_H."""
        return self.v_basis.boundary_indices

    @property
    def dim_hat(self) -> int:
        if self.flux_mode == FluxMode.ELIMINATED:
            return 0
        if self.hat_kind == HatKind.BOUNDARY_TRACE:
            return int(self.hat_indices.size)
        return (self.m + 1) * self.hat_facet_basis.size

    @property
    def n_u(self) -> int:
        return self.n * self.dim_v

    @property
    def n_sigma(self) -> int:
        return self.n * self.dim_sigma

    @property
    def n_hat(self) -> int:
        return self.n * self.dim_hat

    @property
    def n_local(self) -> int:
        return self.n_u + self.n_sigma + self.n_hat

    @property
    def u_slice(self) -> slice:
        return slice(0, self.n_u)

    @property
    def sigma_slice(self) -> slice:
        return slice(self.n_u, self.n_u + self.n_sigma)

    @property
    def hat_slice(self) -> slice:
        return slice(self.n_u + self.n_sigma, self.n_local)

    @property
    def flux_rows(self) -> slice:
        return slice(0, self.n_sigma)

    @property
    def balance_rows(self) -> slice:
        return slice(self.n_sigma, self.n_sigma + self.n_u)

    @property
    def condition_rows(self) -> slice:
        return slice(self.n_sigma + self.n_u, self.n_local)

    def unknown_counts(self) -> Dict[str, int]:
        return {"u": self.n_u, "sigma": self.n_sigma, "sigma_hat": self.n_hat}

    def equation_counts(self) -> Dict[str, int]:
        return {"flux": self.n_sigma, "balance": self.n_u, "condition": self.n_hat}

    def describe(self) -> Dict[str, object]:
        return {
            "family": self.family.value,
            "degree": self.degree,
            "flux_mode": self.flux_mode.value,
            "dim_v": self.dim_v,
            "dim_sigma": self.dim_sigma,
            "dim_hat": self.dim_hat,
            "dim_trace": self.dim_trace,
        }


def local_space_table(method: MethodSpec, m: int, n: int) -> LocalSpaces:
    """Per-family local spaces on an m-simplex for n fields."""
    if m not in (1, 2):
        raise MethodError(f"unsupported space dimension m={m}", family=method.family.value, degree=method.degree)
    if n < 1:
        raise MethodError(f"number of fields must be positive, got {n}", family=method.family.value)

    r = method.degree
    v_offset, s_offset, sigma_kind, t_offset = _FAMILY_TABLE[method.family]
    v_degree, sigma_degree, trace_degree = r + v_offset, r + s_offset, r + t_offset
    if min(v_degree, sigma_degree, trace_degree) < 0:
        raise MethodError(
            f"{method.family.value} is undefined at degree {r}",
            family=method.family.value,
            degree=r,
        )

    v_family = BasisFamily.NODAL if method.family == MethodFamily.CG_H else BasisFamily.MODAL
    v_basis = scalar_basis(v_degree, m, v_family)
    if sigma_kind == BasisKind.RT:
        sigma_basis = rt_basis(sigma_degree, m)
    else:
        sigma_basis = vector_basis(sigma_degree, m)
    trace_basis = facet_trace_basis(trace_degree, m - 1)

    hat_kind = None
    hat_facet_basis = None
    if method.family == MethodFamily.CG_H:
        hat_kind = HatKind.BOUNDARY_TRACE
    elif method.family == MethodFamily.NC_H:
        hat_kind = HatKind.FACETWISE
        hat_facet_basis = facet_trace_basis(r - 1, m - 1)

    spaces = LocalSpaces(
        family=method.family,
        degree=r,
        m=m,
        n=n,
        flux_mode=method.flux_mode,
        v_degree=v_degree,
        sigma_degree=sigma_degree,
        sigma_kind=sigma_kind,
        trace_degree=trace_degree,
        v_basis=v_basis,
        sigma_basis=sigma_basis,
        trace_basis=trace_basis,
        hat_kind=hat_kind,
        hat_facet_basis=hat_facet_basis,
    )
    logger.debug(f"Local spaces for {method.label}, m={m}, n={n}: {spaces.describe()}")
    return spaces


@dataclass(frozen=True, eq=False)
class TraceLayout:
    """
    Global numbering of trace nodes and trace DOFs (dof = node * n + i).

    For CG_H the nodes are shared: mesh vertices keep their ids and the k - 1
    interior nodes of edge e follow as n_vertices + e * (k - 1) + j. Otherwise
    each facet owns its nodes consecutively. facet_nodes[e][t] is the node of
    facet-local trace function t, with t parametrized from the lower vertex id.
    """
    n: int
    continuous: bool
    node_points: np.ndarray
    facet_nodes: Tuple[Tuple[int, ...], ...]
    boundary_dofs: np.ndarray
    interior_dofs: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.node_points.shape[0])

    @property
    def n_dofs(self) -> int:
        return self.n_nodes * self.n

    def facet_dofs(self, facet_id: int) -> np.ndarray:
        """Global DOFs of a facet ordered i * NT + t."""
        nodes = np.asarray(self.facet_nodes[facet_id], dtype=np.int64)
        return np.concatenate([nodes * self.n + i for i in range(self.n)])

    def dof_node(self, dof: int) -> Tuple[int, int]:
        return divmod(int(dof), self.n)

    def is_boundary(self, dof: int) -> bool:
        return bool(np.isin(dof, self.boundary_dofs))


def build_trace_layout(mesh: Mesh, spaces: LocalSpaces) -> TraceLayout:
    """Number the trace unknowns of a mesh for the given local spaces."""
    n = spaces.n
    k = spaces.trace_degree
    continuous = spaces.family == MethodFamily.CG_H
    nt = spaces.dim_trace
    t_nodes = lattice_nodes(k, mesh.dim - 1)
    t_params = t_nodes[:, 0] if mesh.dim == 2 else np.zeros(1)

    facet_nodes: List[Tuple[int, ...]] = []
    points: Dict[int, np.ndarray] = {}

    for facet_id, facet in enumerate(mesh.facets):
        coordinates = mesh.facet_points(facet_id, t_params)
        if continuous and mesh.dim == 1:
            nodes = (facet.vertices[0],)
        elif continuous:
            interior = [mesh.n_vertices + facet_id * (k - 1) + j for j in range(k - 1)]
            nodes = tuple([facet.vertices[0], facet.vertices[1]] + interior)
        else:
            nodes = tuple(facet_id * nt + t for t in range(nt))
        for t, node in enumerate(nodes):
            points.setdefault(node, coordinates[t])
        facet_nodes.append(nodes)

    n_nodes = max(points) + 1
    node_points = np.zeros((n_nodes, mesh.dim))
    for node, point in points.items():
        node_points[node] = point

    boundary_nodes = sorted({node for e in mesh.boundary_facet_ids for node in facet_nodes[e]})
    boundary = np.array([node * n + i for node in boundary_nodes for i in range(n)], dtype=np.int64)
    boundary.sort()
    interior = np.setdiff1d(np.arange(n_nodes * n, dtype=np.int64), boundary)

    return TraceLayout(
        n=n,
        continuous=continuous,
        node_points=node_points,
        facet_nodes=tuple(facet_nodes),
        boundary_dofs=boundary,
        interior_dofs=interior,
    )
