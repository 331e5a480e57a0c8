"""Normal jumps of the numerical flux and trace identification for CG_H and NC_H."""

import logging
from dataclasses import dataclass
from typing import Dict

import numpy as np

from ..errors import MethodError
from ..hdg import DiscreteSolution, MethodFamily

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ConservativityResult:
    per_facet: Dict[int, float]
    max: float


def conservativity_jump(base: DiscreteSolution) -> ConservativityResult:
    """Per internal facet, max over fields of the L2(e) norm of sigma_hat.n+ + sigma_hat.n-."""
    problem = base.problem
    mesh = base.mesh
    per_facet: Dict[int, float] = {}
    for facet_id in mesh.internal_facet_ids:
        facet = mesh.facets[facet_id]
        plus, minus = facet.side_plus, facet.side_minus
        flux_plus = problem.facet_values(base.vector, plus.cell, plus.local_facet)["sigma_hat_n"]
        flux_minus = problem.facet_values(base.vector, minus.cell, minus.local_facet)["sigma_hat_n"]
        weights = problem.elements[plus.cell].facets[plus.local_facet].weights
        jump = flux_plus + flux_minus
        per_facet[facet_id] = float(np.sqrt(weights @ (jump * jump)).max())
    worst = max(per_facet.values(), default=0.0)
    logger.debug(f"Largest normal flux jump for {base.method.label}: {worst:.3e}")
    return ConservativityResult(per_facet=per_facet, max=worst)


def trace_identification_residual(base: DiscreteSolution) -> float:
    """
    CG_H: max over cells of |int_dK (uhat - u) w| over the Sigma_hat(dK) basis.
    NC_H: max over cell facets of the P_{r-1}(e) moments of uhat - u.
    """
    family = base.method.family
    if family not in (MethodFamily.CG_H, MethodFamily.NC_H):
        raise MethodError(f"trace identification does not apply to {family.value}", family=family.value)

    problem = base.problem
    worst = 0.0
    for cell, element in enumerate(problem.elements):
        total = 0.0
        for facet in element.facets:
            values = problem.facet_values(base.vector, cell, facet.local)
            moments = np.einsum("q,qi,qh->ih", facet.weights, values["u_hat"] - values["u"], facet.hat)
            if family == MethodFamily.NC_H:
                worst = max(worst, float(np.abs(moments).max()))
            else:
                total = total + moments
        if family == MethodFamily.CG_H:
            worst = max(worst, float(np.abs(total).max()))
    return worst
