"""Per-cell tabulation of bases on physical quadrature points."""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..config import settings
from ..geometry import Mesh
from ..polyspace import BasisKind, quadrature_rule
from .methods import MethodSpec
from .spaces import HatKind, LocalSpaces

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FacetData:
    """Tables of one cell on one of its facets, at the facet's own quadrature points."""
    facet_id: int
    local: int
    normal: np.ndarray
    is_boundary: bool
    neighbor: Optional[int]
    t: np.ndarray
    points: np.ndarray
    weights: np.ndarray
    v: np.ndarray
    v_grad: np.ndarray
    sigma: np.ndarray
    sigma_n: np.ndarray
    trace: np.ndarray
    hat: Optional[np.ndarray]
    penalty: float


@dataclass(frozen=True, eq=False)
class ElementData:
    """Affine map, cell quadrature and basis tables of one cell."""
    cell: int
    origin: np.ndarray
    jacobian: np.ndarray
    inverse: np.ndarray
    det: float
    points: np.ndarray
    weights: np.ndarray
    v: np.ndarray
    v_grad: np.ndarray
    sigma: np.ndarray
    sigma_div: np.ndarray
    facets: Tuple[FacetData, ...]
    coefficient: Optional[np.ndarray] = None

    def to_reference(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.origin[None, :]) @ self.inverse.T


def quadrature_degrees(spaces: LocalSpaces) -> Tuple[int, int]:
    """Cell and facet quadrature degrees for the given local spaces."""
    sigma_poly = spaces.sigma_degree + (1 if spaces.sigma_kind == BasisKind.RT else 0)
    top = max(spaces.v_degree, sigma_poly)
    cell = 2 * top + settings.cell_quadrature_extra
    facet = 2 * max(top, spaces.trace_degree) + settings.facet_quadrature_extra
    return cell, facet


def _scalar_tables(spaces: LocalSpaces, reference: np.ndarray, inverse: np.ndarray):
    table = spaces.v_basis.tabulate(reference)
    return table.values, np.einsum("qkd,de->qke", table.gradients, inverse)


def _vector_tables(spaces: LocalSpaces, reference: np.ndarray, jacobian: np.ndarray):
    # v = J v_ref keeps RT_r(K) an affine image of RT_r; div_x v = div_ref v_ref
    table = spaces.sigma_basis.tabulate_vector(reference)
    return np.einsum("ed,qkd->qke", jacobian, table.values), table.divergence


def tabulate_element(mesh: Mesh, spaces: LocalSpaces, method: MethodSpec, cell: int) -> ElementData:
    """Evaluate V, Sigma, trace and Sigma_hat bases of a cell on its quadrature points."""
    origin, jacobian = mesh.affine_map(cell)
    inverse = np.linalg.inv(jacobian)
    det = float(np.linalg.det(jacobian))
    cell_degree, facet_degree = quadrature_degrees(spaces)

    rule = quadrature_rule(mesh.dim, cell_degree)
    points = origin[None, :] + rule.points @ jacobian.T
    weights = rule.weights * abs(det)
    v, v_grad = _scalar_tables(spaces, rule.points, inverse)
    sigma, sigma_div = _vector_tables(spaces, rule.points, jacobian)

    facet_rule = quadrature_rule(mesh.dim - 1, facet_degree)
    t = facet_rule.points[:, 0] if mesh.dim == 2 else np.zeros(1)
    facets = []
    for local, facet_id in enumerate(mesh.cell_facets[cell]):
        facet_id = int(facet_id)
        facet = mesh.facets[facet_id]
        side = mesh.side_of(facet_id, cell)
        f_points = mesh.facet_points(facet_id, t)
        reference = (f_points - origin[None, :]) @ inverse.T
        f_v, f_grad = _scalar_tables(spaces, reference, inverse)
        f_sigma, _ = _vector_tables(spaces, reference, jacobian)
        trace = spaces.trace_basis.tabulate(t[:, None], with_gradients=False).values

        hat = None
        if spaces.hat_kind == HatKind.BOUNDARY_TRACE:
            hat = f_v[:, spaces.hat_indices]
        elif spaces.hat_kind == HatKind.FACETWISE:
            block = spaces.hat_facet_basis.size
            hat = np.zeros((len(t), spaces.dim_hat))
            hat[:, local * block:(local + 1) * block] = spaces.hat_facet_basis.tabulate(
                t[:, None], with_gradients=False
            ).values

        neighbor = None
        for other in facet.sides:
            if other.cell != cell:
                neighbor = other.cell
        facets.append(
            FacetData(
                facet_id=facet_id,
                local=local,
                normal=side.normal,
                is_boundary=facet.is_boundary,
                neighbor=neighbor,
                t=t,
                points=f_points,
                weights=facet_rule.weights * facet.measure,
                v=f_v,
                v_grad=f_grad,
                sigma=f_sigma,
                sigma_n=f_sigma @ side.normal,
                trace=trace,
                hat=hat,
                penalty=method.penalty_for(cell, local) if method.uses_penalty else 0.0,
            )
        )

    return ElementData(
        cell=cell,
        origin=origin,
        jacobian=jacobian,
        inverse=inverse,
        det=det,
        points=points,
        weights=weights,
        v=v,
        v_grad=v_grad,
        sigma=sigma,
        sigma_div=sigma_div,
        facets=tuple(facets),
        coefficient=method.coefficient_for(cell),
    )
