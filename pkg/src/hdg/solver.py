"""Newton solution of the hybridized system and Dirichlet data for the traces."""

import logging
from typing import Callable, Mapping, Optional, Union

import numpy as np

from ..config import NewtonConfig, settings
from ..errors import ConvergenceError, ValidationError
from ..geometry import Mesh
from ..system import CanonicalSystem, SourceProbe
from .assembly import DiscreteSolution, HdgProblem, assemble_blocks, global_residual, source_vector
from .condensation import StaticCondensation, check_local_blocks
from .methods import MethodSpec
from .spaces import TraceLayout

logger = logging.getLogger(__name__)

BoundaryInput = Union[np.ndarray, Mapping[int, float], Callable[[np.ndarray], np.ndarray], None]


def random_boundary_data(layout: TraceLayout, seed: Optional[int] = None) -> np.ndarray:
    """Uniform values in [-1, 1] per boundary trace DOF."""
    rng = np.random.default_rng(settings.seed if seed is None else seed)
    return rng.uniform(-1.0, 1.0, size=layout.boundary_dofs.size)


def boundary_data_from_function(layout: TraceLayout, g: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Interpolate g(x) -> (q, n) at the trace nodes of the boundary DOFs."""
    values = np.asarray(g(layout.node_points), dtype=float).reshape(layout.n_nodes, layout.n)
    nodes, components = np.divmod(layout.boundary_dofs, layout.n)
    return values[nodes, components]


def resolve_boundary_data(layout: TraceLayout, data: BoundaryInput) -> np.ndarray:
    """Boundary values aligned with layout.boundary_dofs from an array, mapping or function."""
    boundary = layout.boundary_dofs
    if data is None:
        return np.zeros(boundary.size)
    if callable(data):
        return boundary_data_from_function(layout, data)
    if isinstance(data, Mapping):
        missing = [int(d) for d in boundary if int(d) not in data]
        if missing:
            raise ValidationError(
                f"boundary data misses {len(missing)} boundary trace DOFs (first: {missing[0]})",
                field="boundary_data",
            )
        return np.array([float(data[int(d)]) for d in boundary])
    values = np.asarray(data, dtype=float).ravel()
    if values.size != boundary.size:
        raise ValidationError(
            f"expected {boundary.size} boundary values, got {values.size}",
            field="boundary_data",
        )
    return values


def newton_solve(
    problem: HdgProblem,
    boundary_values: np.ndarray,
    newton: Optional[NewtonConfig] = None,
    initial: Optional[np.ndarray] = None,
) -> DiscreteSolution:
    newton = newton or settings.newton_config
    vector = np.zeros(problem.size) if initial is None else np.array(initial, dtype=float)
    history = []
    scale = None

    for iteration in range(newton.max_iter + 1):
        blocks = assemble_blocks(problem, vector)
        residual = global_residual(problem, vector, blocks, boundary_values)
        norm = float(np.abs(residual).max(initial=0.0))
        history.append(norm)
        if scale is None:
            scale = max(1.0, norm)
        logger.debug(f"Newton iteration {iteration}: |R| = {norm:.3e}")
        if iteration == 0:
            # an iterate accepted without a Newton step still needs solvable local blocks
            check_local_blocks(problem, blocks)
        if norm <= newton.tol * scale:
            logger.info(f"Newton converged for {problem.method.label} in {iteration} iterations (|R| = {norm:.3e})")
            return DiscreteSolution(
                problem=problem,
                vector=vector,
                boundary_values=np.asarray(boundary_values, dtype=float),
                iterations=iteration,
                residual_norm=norm,
                tolerance=newton.tol,
                history=tuple(history),
            )
        if iteration == newton.max_iter:
            break
        condensation = StaticCondensation(problem, blocks)
        vector = vector + condensation.solve_checked(residual, newton.linear_tol)

    raise ConvergenceError(
        f"Newton did not converge in {newton.max_iter} iterations (|R| = {history[-1]:.3e})",
        iterations=newton.max_iter,
        residual=history[-1],
    )


def solve(
    mesh: Mesh,
    method: MethodSpec,
    system: CanonicalSystem,
    boundary_data: BoundaryInput = None,
    newton: Optional[NewtonConfig] = None,
    initial: Optional[np.ndarray] = None,
) -> DiscreteSolution:
    """Solve the square nonlinear system with Dirichlet data on the boundary traces."""
    problem = HdgProblem(mesh, method, system)
    return newton_solve(problem, resolve_boundary_data(problem.layout, boundary_data), newton, initial)


def linearized_solve(
    base: DiscreteSolution,
    boundary_increment: Optional[np.ndarray] = None,
    probe: Optional[SourceProbe] = None,
    condensation: Optional[StaticCondensation] = None,
    max_picard: int = 25,
) -> np.ndarray:
    """
    Solve J d + s(d) = 0 at the base with Dirichlet increments on the boundary rows.

    Sources depending on the increment are handled by fixed-point iteration.
    """
    problem = base.problem
    if condensation is None:
        condensation = StaticCondensation(problem, assemble_blocks(problem, base.vector))
    forcing = np.zeros(problem.size)
    if boundary_increment is not None:
        rows = problem.index.trace_offset + problem.layout.boundary_dofs
        forcing[rows] = -np.asarray(boundary_increment, dtype=float)

    delta = condensation.solve_checked(forcing)
    if probe is None:
        return delta

    for step in range(max_picard):
        updated = condensation.solve_checked(forcing + source_vector(problem, delta, probe))
        change = float(np.abs(updated - delta).max(initial=0.0))
        delta = updated
        if change <= settings.linear_tol * max(1.0, float(np.abs(delta).max(initial=0.0))):
            logger.debug(f"Source iteration settled after {step + 1} steps")
            return delta
    raise ConvergenceError(
        f"source iteration did not settle in {max_picard} steps",
        iterations=max_picard,
        residual=change,
    )
