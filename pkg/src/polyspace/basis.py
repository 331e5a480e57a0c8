"""
Polynomial bases on reference simplices.

Scalar P_r spaces come in two families: a modal basis (monomials orthonormalized
against the reference L2 inner product) and a nodal Lagrange basis on the principal
lattice. Vector spaces are [P_r]^d and the Raviart-Thomas space
RT_r = [P_r]^d + x * (homogeneous P_r), orthonormalized the same way.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from math import comb
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import cholesky, solve_triangular

from ..config import settings
from ..errors import BasisError
from .quadrature import quadrature_rule

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]


class BasisKind(str, Enum):
    """Polynomial space kinds."""
    P_SCALAR = "P_scalar"
    P_VECTOR = "P_vector"
    RT = "RT"


class BasisFamily(str, Enum):
    MODAL = "modal"
    NODAL = "nodal"


@dataclass(frozen=True, eq=False)
class ScalarTable:
    """values[q, k] and gradients[q, k, d]."""
    values: np.ndarray
    gradients: Optional[np.ndarray] = None


@dataclass(frozen=True, eq=False)
class VectorTable:
    """values[q, k, d] and divergence[q, k]."""
    values: np.ndarray
    divergence: np.ndarray


def space_dim(kind: BasisKind, r: int, d: int) -> int:
    """Dimension of P_scalar, P_vector or RT of degree r on a d-simplex."""
    try:
        kind = BasisKind(kind)
    except ValueError as e:
        raise BasisError(f"unsupported basis kind {kind!r}", kind=str(kind), degree=r) from e
    if r < 0 or d not in (1, 2):
        raise BasisError(f"unsupported space ({kind.value}, r={r}, d={d})", kind=kind.value, degree=r)

    scalar = comb(r + d, d)
    if kind == BasisKind.P_SCALAR:
        return scalar
    if kind == BasisKind.P_VECTOR:
        return d * scalar
    return d * scalar + comb(r + d - 1, d - 1)


def _check_degree(r: int, allow_high_degree: bool) -> None:
    if r < 0:
        raise BasisError(f"negative degree {r}", degree=r)
    if r > settings.max_degree and not (allow_high_degree or settings.allow_high_degree):
        raise BasisError(
            f"degree {r} exceeds the conditioning cap {settings.max_degree}",
            degree=r,
        )


def monomial_exponents(r: int, d: int, homogeneous: bool = False) -> List[Exponent]:
    """Exponents ordered by total degree, then by decreasing power of x."""
    degrees = [r] if homogeneous else range(r + 1)
    exponents: List[Exponent] = []
    for k in degrees:
        if d == 0:
            if k == 0:
                exponents.append(())
        elif d == 1:
            exponents.append((k,))
        else:
            for b in range(k + 1):
                exponents.append((k - b, b))
    return exponents


def evaluate_monomials(exponents: List[Exponent], points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Monomial values (q, N) and gradients (q, N, d)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n_points, d = points.shape
    values = np.ones((n_points, len(exponents)))
    gradients = np.zeros((n_points, len(exponents), d))

    for k, exponent in enumerate(exponents):
        for axis, power in enumerate(exponent):
            values[:, k] *= points[:, axis] ** power
        for axis in range(d):
            power = exponent[axis]
            if power == 0:
                continue
            grad = power * points[:, axis] ** (power - 1)
            for other, other_power in enumerate(exponent):
                if other != axis:
                    grad = grad * points[:, other] ** other_power
            gradients[:, k, axis] = grad
    return values, gradients


def lattice_nodes(r: int, d: int) -> np.ndarray:
    """Principal lattice nodes: vertices, then edge-interior nodes, then interior nodes."""
    if d == 0:
        return np.zeros((1, 0))
    if r == 0:
        return np.full((1, d), 1.0 / (d + 1))

    if d == 1:
        interior = [k / r for k in range(1, r)]
        return np.array([[0.0], [1.0]] + [[t] for t in interior])

    corners = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    nodes = [corners[0], corners[1], corners[2]]
    # edge opposite local vertex j, walked from the lower to the higher vertex
    for a, b in ((1, 2), (0, 2), (0, 1)):
        for k in range(1, r):
            nodes.append(corners[a] + (k / r) * (corners[b] - corners[a]))
    for j in range(1, r):
        for i in range(1, r - j):
            nodes.append(np.array([i / r, j / r]))
    return np.array(nodes)


def _on_boundary(points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    barycentric = np.hstack([1.0 - points.sum(axis=1, keepdims=True), points])
    return np.any(np.abs(barycentric) < tol, axis=1)


@dataclass(frozen=True, eq=False)
class BasisSet:
    """
    A basis expressed as coefficient combinations of raw fields.

    Raw scalar fields are the monomials of `exponents`. Raw vector fields are
    e_mu * monomial (mu outer), followed for RT by xi * h for the homogeneous
    degree-r monomials h.
    """
    kind: BasisKind
    degree: int
    sim_dim: int
    family: BasisFamily
    exponents: Tuple[Exponent, ...]
    coefficients: np.ndarray
    nodes: Optional[np.ndarray] = None
    homogeneous: Tuple[Exponent, ...] = ()

    @property
    def size(self) -> int:
        return int(self.coefficients.shape[1])

    @property
    def boundary_indices(self) -> np.ndarray:
        """Nodal functions attached to boundary lattice nodes (non-bubbles)."""
        if self.nodes is None:
            raise BasisError("boundary indices need a nodal basis", kind=self.kind.value, degree=self.degree)
        return np.flatnonzero(_on_boundary(self.nodes))

    def tabulate(self, points: np.ndarray, with_gradients: bool = True) -> ScalarTable:
        if self.kind != BasisKind.P_SCALAR:
            raise BasisError("tabulate is for scalar bases; use tabulate_vector", kind=self.kind.value)
        if self.sim_dim == 0:
            n_points = max(1, np.asarray(points).shape[0] if np.ndim(points) else 1)
            return ScalarTable(values=np.ones((n_points, 1)), gradients=np.zeros((n_points, 1, 0)))
        values, gradients = evaluate_monomials(list(self.exponents), np.asarray(points).reshape(-1, self.sim_dim))
        table_values = values @ self.coefficients
        table_gradients = None
        if with_gradients:
            table_gradients = np.einsum("qjd,jk->qkd", gradients, self.coefficients)
        return ScalarTable(values=table_values, gradients=table_gradients)

    def tabulate_vector(self, points: np.ndarray) -> VectorTable:
        if self.kind == BasisKind.P_SCALAR:
            raise BasisError("tabulate_vector is for vector bases", kind=self.kind.value)
        raw_values, raw_div = _raw_vector_fields(
            list(self.exponents), list(self.homogeneous), self.degree, np.asarray(points).reshape(-1, self.sim_dim)
        )
        values = np.einsum("qjd,jk->qkd", raw_values, self.coefficients)
        divergence = raw_div @ self.coefficients
        return VectorTable(values=values, divergence=divergence)


def _raw_vector_fields(
    exponents: List[Exponent],
    homogeneous: List[Exponent],
    r: int,
    points: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    n_points, d = points.shape
    mono, mono_grad = evaluate_monomials(exponents, points)
    n_mono = len(exponents)
    n_raw = d * n_mono + len(homogeneous)
    values = np.zeros((n_points, n_raw, d))
    divergence = np.zeros((n_points, n_raw))

    for mu in range(d):
        block = slice(mu * n_mono, (mu + 1) * n_mono)
        values[:, block, mu] = mono
        divergence[:, block] = mono_grad[:, :, mu]

    if homogeneous:
        h_values, _ = evaluate_monomials(homogeneous, points)
        offset = d * n_mono
        for mu in range(d):
            values[:, offset:, mu] = points[:, mu : mu + 1] * h_values
        # Euler: div(xi h) = (d + r) h for h homogeneous of degree r
        divergence[:, offset:] = (d + r) * h_values
    return values, divergence


def _orthonormalizing_coefficients(gram: np.ndarray) -> np.ndarray:
    lower = cholesky(gram, lower=True)
    return solve_triangular(lower, np.eye(gram.shape[0]), lower=True).T


@lru_cache(maxsize=None)
def scalar_basis(r: int, d: int, family: BasisFamily = BasisFamily.MODAL, allow_high_degree: bool = False) -> BasisSet:
    """P_r on the reference d-simplex (d = 0 gives the constant on a point)."""
    _check_degree(r, allow_high_degree)
    family = BasisFamily(family)
    exponents = monomial_exponents(r, d)

    if d == 0:
        return BasisSet(
            kind=BasisKind.P_SCALAR, degree=r, sim_dim=0, family=family,
            exponents=tuple(exponents), coefficients=np.ones((1, 1)), nodes=np.zeros((1, 0)),
        )

    if family == BasisFamily.MODAL:
        rule = quadrature_rule(d, 2 * r)
        values, _ = evaluate_monomials(exponents, rule.points)
        gram = values.T @ (rule.weights[:, None] * values)
        coefficients = _orthonormalizing_coefficients(gram)
        nodes = None
    else:
        nodes = lattice_nodes(r, d)
        vandermonde, _ = evaluate_monomials(exponents, nodes)
        coefficients = np.linalg.inv(vandermonde)

    return BasisSet(
        kind=BasisKind.P_SCALAR, degree=r, sim_dim=d, family=family,
        exponents=tuple(exponents), coefficients=coefficients, nodes=nodes,
    )


@lru_cache(maxsize=None)
def vector_basis(r: int, d: int, allow_high_degree: bool = False) -> BasisSet:
    """[P_r]^d with orthonormal modal components, component-major ordering."""
    scalar = scalar_basis(r, d, BasisFamily.MODAL, allow_high_degree)
    n_mono = len(scalar.exponents)
    coefficients = np.zeros((d * n_mono, d * scalar.size))
    for mu in range(d):
        coefficients[mu * n_mono:(mu + 1) * n_mono, mu * scalar.size:(mu + 1) * scalar.size] = scalar.coefficients
    return BasisSet(
        kind=BasisKind.P_VECTOR, degree=r, sim_dim=d, family=BasisFamily.MODAL,
        exponents=scalar.exponents, coefficients=coefficients,
    )


@lru_cache(maxsize=None)
def rt_basis(r: int, d: int, allow_high_degree: bool = False) -> BasisSet:
    """Raviart-Thomas RT_r = [P_r]^d + xi * (homogeneous P_r), orthonormalized."""
    _check_degree(r, allow_high_degree)
    exponents = monomial_exponents(r, d)
    homogeneous = monomial_exponents(r, d, homogeneous=True)
    rule = quadrature_rule(d, 2 * r + 2)
    values, _ = _raw_vector_fields(exponents, homogeneous, r, rule.points)
    gram = np.einsum("q,qid,qjd->ij", rule.weights, values, values)
    coefficients = _orthonormalizing_coefficients(gram)
    basis = BasisSet(
        kind=BasisKind.RT, degree=r, sim_dim=d, family=BasisFamily.MODAL,
        exponents=tuple(exponents), coefficients=coefficients, homogeneous=tuple(homogeneous),
    )
    if basis.size != space_dim(BasisKind.RT, r, d):
        raise BasisError("RT basis size mismatch", kind="RT", degree=r)
    return basis


@lru_cache(maxsize=None)
def facet_trace_basis(k: int, sim_dim: int) -> BasisSet:
    """Nodal P_k on a reference facet: [0, 1] in 2-D meshes, a point in 1-D meshes."""
    return scalar_basis(k, sim_dim, BasisFamily.NODAL)


def reference_facets(d: int) -> List[Tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """(start, end, outward normal) of the facet opposite each reference vertex."""
    if d == 1:
        return [
            (np.array([1.0]), np.array([1.0]), np.array([1.0])),
            (np.array([0.0]), np.array([0.0]), np.array([-1.0])),
        ]
    s = 1.0 / np.sqrt(2.0)
    return [
        (np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([s, s])),
        (np.array([0.0, 0.0]), np.array([0.0, 1.0]), np.array([-1.0, 0.0])),
        (np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([0.0, -1.0])),
    ]


def eval_scalar_basis(
    r: int,
    d: int,
    points: np.ndarray,
    with_gradients: bool = True,
    family: BasisFamily = BasisFamily.MODAL,
    allow_high_degree: bool = False,
) -> ScalarTable:
    """Tabulate a modal or nodal P_r basis at reference points."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if d > 0:
        barycentric = np.hstack([1.0 - points.sum(axis=1, keepdims=True), points])
        if np.any(barycentric < -1e-12):
            raise BasisError("points must lie inside the reference simplex", degree=r)
    return scalar_basis(r, d, BasisFamily(family), allow_high_degree).tabulate(points, with_gradients)


def eval_rt_basis(
    r: int,
    d: int,
    points: np.ndarray,
    facet_degree: Optional[int] = None,
    allow_high_degree: bool = False,
) -> Tuple[VectorTable, List[Tuple[np.ndarray, np.ndarray]]]:
    """RT_r values/divergence at points, plus per-facet (parameters, normal traces)."""
    basis = rt_basis(r, d, allow_high_degree)
    table = basis.tabulate_vector(np.atleast_2d(np.asarray(points, dtype=float)))

    traces = []
    facet_rule = quadrature_rule(d - 1, facet_degree if facet_degree is not None else 2 * r + 4)
    for start, end, normal in reference_facets(d):
        t = facet_rule.points[:, 0] if d == 2 else np.zeros(1)
        facet_points = start[None, :] + t[:, None] * (end - start)[None, :]
        facet_table = basis.tabulate_vector(facet_points)
        traces.append((t, facet_table.values @ normal))
    return table, traces
