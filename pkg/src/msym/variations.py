"""Tangent variations of a solution with respect to its boundary trace data."""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from ..errors import VerificationError
from ..hdg import DiscreteSolution, StaticCondensation, assemble_blocks, global_jacobian, linearized_solve

logger = logging.getLogger(__name__)

FacetKey = Tuple[int, int]


def variation_labels(base: DiscreteSolution) -> Tuple[str, ...]:
    """u1, u2, ... for scalar CG_H vertex traces, dof<g> otherwise."""
    layout = base.problem.layout
    labels = []
    for dof in layout.boundary_dofs:
        node, _ = layout.dof_node(dof)
        if layout.continuous and layout.n == 1 and node < base.mesh.n_vertices:
            labels.append(f"u{node + 1}")
        else:
            labels.append(f"dof{int(dof)}")
    return tuple(labels)


@dataclass(frozen=True, eq=False)
class VariationSet:
    """
    One linearized solution per boundary trace DOF, in the layout of the base.

    `vectors[a]` is the derivative of the solve map along a unit change of the
    boundary value at `dofs[a]`.
    """
    base: DiscreteSolution
    labels: Tuple[str, ...]
    dofs: np.ndarray
    vectors: np.ndarray
    _tables: Dict[FacetKey, Dict[str, np.ndarray]] = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return int(self.vectors.shape[0])

    def facet_table(self, cell: int, local_facet: int) -> Dict[str, np.ndarray]:
        """Stacked facet values of every variation: each entry (n_var, q, n)."""
        key = (cell, local_facet)
        if key not in self._tables:
            problem = self.base.problem
            per_variation = [problem.facet_values(v, cell, local_facet) for v in self.vectors]
            self._tables[key] = {
                name: np.stack([values[name] for values in per_variation])
                for name in ("u", "sigma_n", "u_hat", "sigma_hat_n")
            }
        return self._tables[key]

    def linear_residual(self) -> float:
        """max_a ||J V_a||_inf on non-Dirichlet rows / max(1, ||V_a||_inf)."""
        problem = self.base.problem
        jacobian = global_jacobian(problem, assemble_blocks(problem, self.base.vector))
        keep = np.ones(problem.size, dtype=bool)
        keep[problem.index.trace_offset + problem.layout.boundary_dofs] = False
        worst = 0.0
        for vector in self.vectors:
            defect = (jacobian @ vector)[keep]
            worst = max(worst, float(np.abs(defect).max(initial=0.0)) / max(1.0, float(np.abs(vector).max())))
        return worst


def tangent_variations(
    base: DiscreteSolution,
    condensation: Optional[StaticCondensation] = None,
) -> VariationSet:
    """Solve the linearized problem once per boundary trace DOF with a unit Dirichlet increment."""
    problem = base.problem
    boundary = problem.layout.boundary_dofs
    if boundary.size == 0:
        raise VerificationError("the mesh has no boundary trace DOFs to vary", check="variations")
    if condensation is None:
        condensation = StaticCondensation(problem, assemble_blocks(problem, base.vector))

    vectors = np.zeros((boundary.size, problem.size))
    for a in range(boundary.size):
        increment = np.zeros(boundary.size)
        increment[a] = 1.0
        vectors[a] = linearized_solve(base, increment, condensation=condensation)

    variations = VariationSet(
        base=base,
        labels=variation_labels(base),
        dofs=boundary.copy(),
        vectors=vectors,
    )
    logger.info(f"Computed {len(variations)} tangent variations for {base.method.label}")
    return variations
