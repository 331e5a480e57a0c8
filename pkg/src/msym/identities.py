"""Green's second identity, the integral reciprocity law and its discrete counterpart."""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from ..errors import ValidationError
from ..geometry import Mesh
from ..hdg import DiscreteSolution, StaticCondensation, assemble_blocks, linearized_solve
from ..polyspace import quadrature_rule
from ..system import SourceProbe

logger = logging.getLogger(__name__)

PointMap = Callable[[np.ndarray], np.ndarray]


class IdentityKind(str, Enum):
    GREEN_SECOND_IDENTITY = "green_second_identity"
    RECIPROCITY_INTEGRAL = "reciprocity_integral"


@dataclass(frozen=True, eq=False)
class TestField:
    """
    A smooth scalar v with gradient and Laplacian, all batched over points (q, m).

    `flux` and `flux_divergence` optionally give tau; otherwise tau = grad v.
    The reciprocity sources are then psi = grad v - tau and g = -div tau.
    """
    __test__ = False

    value: PointMap
    gradient: PointMap
    laplacian: PointMap
    flux: Optional[PointMap] = None
    flux_divergence: Optional[PointMap] = None

    def tau(self, x: np.ndarray) -> np.ndarray:
        return np.asarray((self.flux or self.gradient)(x), dtype=float).reshape(x.shape[0], -1)

    def psi(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.gradient(x), dtype=float).reshape(x.shape[0], -1) - self.tau(x)

    def g(self, x: np.ndarray) -> np.ndarray:
        if self.flux is None:
            return -np.asarray(self.laplacian(x), dtype=float).reshape(-1)
        if self.flux_divergence is None:
            raise ValidationError("a custom flux needs its divergence", field="flux_divergence")
        return -np.asarray(self.flux_divergence(x), dtype=float).reshape(-1)


REFERENCE_TRIANGLE = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))


def _single_cell(vertices: Sequence[Sequence[float]]) -> Mesh:
    corners = np.asarray(vertices, dtype=float)
    dim = corners.shape[1]
    return Mesh.from_arrays(dim, corners, [tuple(range(dim + 1))])


def continuum_identity_check(
    kind: IdentityKind,
    v: TestField,
    v_prime: TestField,
    cell_vertices: Sequence[Sequence[float]] = REFERENCE_TRIANGLE,
    degree: int = 16,
) -> float:
    """|LHS - RHS| of an integral identity on one simplex, by quadrature."""
    kind = IdentityKind(kind)
    mesh = _single_cell(cell_vertices)
    origin, jacobian = mesh.affine_map(0)
    rule = quadrature_rule(mesh.dim, degree)
    x = origin[None, :] + rule.points @ jacobian.T
    w = rule.weights * abs(np.linalg.det(jacobian))

    facet_rule = quadrature_rule(mesh.dim - 1, degree)
    t = facet_rule.points[:, 0] if mesh.dim == 2 else np.zeros(1)
    boundary = 0.0
    for facet_id, facet in enumerate(mesh.facets):
        xf = mesh.facet_points(facet_id, t)
        wf = facet_rule.weights * facet.measure
        normal = facet.side_plus.normal
        if kind == IdentityKind.GREEN_SECOND_IDENTITY:
            integrand = (
                v.value(xf) * (v_prime.gradient(xf) @ normal) - v_prime.value(xf) * (v.gradient(xf) @ normal)
            )
        else:
            integrand = v.value(xf) * (v_prime.tau(xf) @ normal) - v_prime.value(xf) * (v.tau(xf) @ normal)
        boundary += float(wf @ np.asarray(integrand).reshape(-1))

    if kind == IdentityKind.GREEN_SECOND_IDENTITY:
        volume_integrand = v.value(x) * v_prime.laplacian(x) - v_prime.value(x) * v.laplacian(x)
    else:
        volume_integrand = (
            np.sum(v.psi(x) * v_prime.tau(x), axis=1)
            - v.value(x) * v_prime.g(x)
            - np.sum(v_prime.psi(x) * v.tau(x), axis=1)
            + v_prime.value(x) * v.g(x)
        )
    volume = float(w @ np.asarray(volume_integrand).reshape(-1))
    return abs(boundary - volume)


@dataclass(frozen=True, eq=False)
class ReciprocityResult:
    residual: float
    boundary_term: float
    volume_term: float


def discrete_reciprocity_residual(
    base: DiscreteSolution,
    probe: SourceProbe,
    probe_prime: SourceProbe,
    seed: int = 0,
    increments: Optional[Tuple[np.ndarray, np.ndarray]] = None,
) -> ReciprocityResult:
    """
    Solve two linearized problems with incremental sources and compare

        sum_K int_dK (vhat tauhat'.n - vhat' tauhat.n)
        with sum_K int_K [psi.tau' - v g' - psi'.tau + v' g].

    Dirichlet increments are drawn from [-1, 1] with `seed` unless given.
    """
    problem = base.problem
    boundary = problem.layout.boundary_dofs
    if increments is None:
        rng = np.random.default_rng(seed)
        increments = (rng.uniform(-1.0, 1.0, boundary.size), rng.uniform(-1.0, 1.0, boundary.size))

    condensation = StaticCondensation(problem, assemble_blocks(problem, base.vector))
    first = linearized_solve(base, increments[0], probe, condensation)
    second = linearized_solve(base, increments[1], probe_prime, condensation)

    boundary_term = 0.0
    volume_term = 0.0
    for cell, element in enumerate(problem.elements):
        for facet in element.facets:
            a = problem.facet_values(first, cell, facet.local)
            b = problem.facet_values(second, cell, facet.local)
            integrand = np.sum(a["u_hat"] * b["sigma_hat_n"] - b["u_hat"] * a["sigma_hat_n"], axis=1)
            boundary_term += float(facet.weights @ integrand)

        v, tau = problem.cell_values(first, cell)
        v2, tau2 = problem.cell_values(second, cell)
        x = element.points
        q = x.shape[0]
        psi = np.asarray(probe.psi(x, v, tau), dtype=float).reshape(q, -1)
        g = np.asarray(probe.g(x, v, tau), dtype=float).reshape(q, -1)
        psi2 = np.asarray(probe_prime.psi(x, v2, tau2), dtype=float).reshape(q, -1)
        g2 = np.asarray(probe_prime.g(x, v2, tau2), dtype=float).reshape(q, -1)
        integrand = (
            np.sum(psi * tau2, axis=1) - np.sum(v * g2, axis=1) - np.sum(psi2 * tau, axis=1) + np.sum(v2 * g, axis=1)
        )
        volume_term += float(element.weights @ integrand)

    scale = max(1.0, abs(boundary_term), abs(volume_term))
    residual = abs(boundary_term - volume_term) / scale
    logger.debug(f"Discrete reciprocity for {base.method.label}: {residual:.3e}")
    return ReciprocityResult(residual=residual, boundary_term=boundary_term, volume_term=volume_term)
