"""
CG_H for Laplace's equation: multisymplectic on each triangle, not strongly so.

T is the left triangle of the two-equilateral mesh. With vertex traces
(u1, u2, u3) the local solver produces the boundary flux coefficients
w = (sqrt(6)/6) (3I - 11^T) u, the three edge 2-forms cancel over dT, and on
the two-triangle mesh the boundary 2-form is (sqrt(3)/6)(du2 + du3)^(du1 + du4).
"""
import logging
import math
from typing import List, Sequence

import numpy as np

from ..errors import ValidationError
from ..geometry import Mesh, build_two_equilateral_mesh
from ..hdg import MethodFamily, MethodSpec, solve
from ..models.report import CounterexampleRecord, SubCheck
from ..system import poisson
from .pairing import antisymmetric, boundary_pairing, facet_pairing
from .variations import VariationSet, tangent_variations

logger = logging.getLogger(__name__)

TOLERANCE = 1e-12
SUM_TOLERANCE = 1e-13

W_SCALE = math.sqrt(6.0) / 6.0
FORM_SCALE = math.sqrt(3.0) / 6.0

PAIRING_PATTERN = np.array([
    [2.0, -1.0, -1.0, 0.0],
    [0.0, 2.0, -2.0, 0.0],
    [0.0, -2.0, 2.0, 0.0],
    [0.0, -1.0, -1.0, 2.0],
])


def wedge(p: int, q: int, size: int = 3) -> np.ndarray:
    """du_p ^ du_q as an antisymmetric matrix (1-based p, q)."""
    form = np.zeros((size, size))
    form[p - 1, q - 1] = 1.0
    form[q - 1, p - 1] = -1.0
    return form


def expected_w_map() -> np.ndarray:
    return W_SCALE * (3.0 * np.eye(3) - np.ones((3, 3)))


def expected_edge_forms() -> List[np.ndarray]:
    """Edge 2-forms ordered by local facet (facet j is opposite vertex j)."""
    return [
        FORM_SCALE * (wedge(1, 2) - wedge(3, 1)),
        FORM_SCALE * (wedge(2, 3) - wedge(1, 2)),
        FORM_SCALE * (wedge(3, 1) - wedge(2, 3)),
    ]


def _check(name: str, expected: np.ndarray, computed: np.ndarray, tolerance: float = TOLERANCE) -> SubCheck:
    expected = np.atleast_2d(np.asarray(expected, dtype=float))
    computed = np.atleast_2d(np.asarray(computed, dtype=float))
    error = float(np.abs(expected - computed).max())
    passed = error <= tolerance
    if not passed:
        logger.warning(f"Counterexample check {name} failed: deviation {error:.3e} > {tolerance:.0e}")
    return SubCheck(
        name=name,
        expected=expected.tolist(),
        computed=computed.tolist(),
        error=error,
        tolerance=tolerance,
        passed=passed,
    )


def _laplace_variations(mesh: Mesh) -> VariationSet:
    method = MethodSpec(MethodFamily.CG_H, 1)
    base = solve(mesh, method, poisson(2))
    return tangent_variations(base)


def triangle_mesh(vertices: Sequence[Sequence[float]]) -> Mesh:
    return Mesh.from_arrays(2, vertices, [(0, 1, 2)])


def cgh_counterexample(degree: int = 1) -> CounterexampleRecord:
    """Reproduce the CG_H computations and compare each against its closed form."""
    if degree != 1:
        raise ValidationError("the CG_H counterexample is defined for degree 1 only", field="degree", value=degree)

    pair_mesh = build_two_equilateral_mesh()
    single = _laplace_variations(triangle_mesh(pair_mesh.cell_vertices(0)))
    problem = single.base.problem

    w_map = np.column_stack([problem.hat_coefficients(vector, 0)[0] for vector in single.vectors])
    edge_forms = [antisymmetric(facet_pairing(single, 0, local)) for local in range(3)]
    checks = [
        _check("w_map", expected_w_map(), w_map),
        _check("edge_forms", np.vstack(expected_edge_forms()), np.vstack(edge_forms)),
        _check("edge_sum", np.zeros((3, 3)), sum(edge_forms), SUM_TOLERANCE),
    ]

    pair = _laplace_variations(pair_mesh)
    pairing = boundary_pairing(pair, range(pair_mesh.n_cells))
    checks.append(_check("boundary_form", FORM_SCALE * PAIRING_PATTERN, pairing.matrix))
    # v2 = v'1 = 1: the pair (V_2, V_1)
    checks.append(_check("variation_pair", [[FORM_SCALE]], [[pairing.form(1, 0)]]))

    record = CounterexampleRecord(
        degree=degree,
        labels=list(pair.labels),
        checks=checks,
        strong_residual=pairing.residual,
        strong_absolute=pairing.absolute,
    )
    logger.info(
        f"CG_H counterexample: {len(checks) - len(record.failed_checks)}/{len(checks)} checks match, "
        f"strong residual {record.strong_residual:.6f}"
    )
    return record
