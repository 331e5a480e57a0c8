"""Static condensation of cell unknowns onto the trace DOFs."""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.linalg import lu_factor, lu_solve
from scipy.sparse.linalg import splu

from ..config import settings
from ..errors import SingularBlockError, SingularJacobianError
from .assembly import CellBlocks, DiscreteSolution, HdgProblem, assemble_blocks, global_jacobian

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class _CellFactor:
    cell: int
    dofs: np.ndarray
    lu: Tuple[np.ndarray, np.ndarray]
    a_inv_b: np.ndarray
    C: np.ndarray


def _cell_penalties(problem: HdgProblem, cell: int) -> List[float]:
    return [facet.penalty for facet in problem.elements[cell].facets]


def check_local_block(problem: HdgProblem, block: CellBlocks) -> None:
    """Raise SingularBlockError when the cell-local block A_K is numerically singular."""
    condition = np.linalg.cond(block.A)
    if not np.isfinite(condition) or condition > settings.singular_block_cond:
        penalties = _cell_penalties(problem, block.cell)
        raise SingularBlockError(
            f"local block of cell {block.cell} is singular (cond {condition:.3e}, penalties {penalties})",
            cell_id=block.cell,
            penalties=penalties,
            condition=float(condition),
        )


def check_local_blocks(problem: HdgProblem, blocks: Sequence[CellBlocks]) -> None:
    for block in blocks:
        check_local_block(problem, block)


class StaticCondensation:
    """
    Per-cell elimination S_K = D_K - C_K A_K^{-1} B_K accumulated over all trace DOFs.

    The trace system keeps the condensed rows on interior DOFs and identity rows on
    boundary DOFs. `solve(R)` returns the Newton update d with J d = -R.
    """

    def __init__(self, problem: HdgProblem, blocks: Sequence[CellBlocks]):
        self.problem = problem
        self.blocks = list(blocks)
        n_trace = problem.layout.n_dofs
        self.factors: List[_CellFactor] = []

        rows, cols, vals = [], [], []
        for b in self.blocks:
            check_local_block(problem, b)
            lu = lu_factor(b.A)
            a_inv_b = lu_solve(lu, b.B)
            schur = b.D - b.C @ a_inv_b
            rr, cc = np.meshgrid(b.dofs, b.dofs, indexing="ij")
            rows.append(rr.ravel())
            cols.append(cc.ravel())
            vals.append(schur.ravel())
            self.factors.append(_CellFactor(cell=b.cell, dofs=b.dofs, lu=lu, a_inv_b=a_inv_b, C=b.C))

        self.condensed = sparse.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n_trace, n_trace),
        ).tocsr()

        boundary = problem.layout.boundary_dofs
        interior_mask = np.zeros(n_trace, dtype=bool)
        interior_mask[problem.layout.interior_dofs] = True
        keep = sparse.diags(interior_mask.astype(float))
        pin = sparse.coo_matrix((np.ones(boundary.size), (boundary, boundary)), shape=(n_trace, n_trace))
        self.trace_system = (keep @ self.condensed + pin).tocsc()
        self._interior_mask = interior_mask
        try:
            self._factor = splu(self.trace_system)
        except RuntimeError as e:
            raise SingularJacobianError(f"condensed trace system is singular: {e}", original_error=e)

    def solve(self, residual: np.ndarray) -> np.ndarray:
        problem = self.problem
        trace_rhs = -problem.trace_vector(residual).copy()
        local_solves = []
        gathered = np.zeros(problem.layout.n_dofs)
        for f in self.factors:
            y = lu_solve(f.lu, residual[problem.index.cell_slice(f.cell)])
            local_solves.append(y)
            np.add.at(gathered, f.dofs, f.C @ y)
        trace_rhs[self._interior_mask] += gathered[self._interior_mask]

        delta_trace = self._factor.solve(trace_rhs)
        if not np.all(np.isfinite(delta_trace)):
            raise SingularJacobianError("condensed solve produced non-finite values")

        delta = np.zeros(problem.size)
        for f, y in zip(self.factors, local_solves):
            delta[problem.index.cell_slice(f.cell)] = -y - f.a_inv_b @ delta_trace[f.dofs]
        delta[problem.index.trace_slice] = delta_trace
        return delta

    def jacobian(self) -> sparse.csr_matrix:
        return global_jacobian(self.problem, self.blocks)

    def solve_checked(self, residual: np.ndarray, tolerance: Optional[float] = None) -> np.ndarray:
        """Solve, verify J d + R against the sparse Jacobian, refine once if needed."""
        tolerance = settings.linear_tol if tolerance is None else tolerance
        jacobian = self.jacobian()
        scale = max(1.0, float(np.abs(residual).max(initial=0.0)))
        delta = self.solve(residual)
        defect = jacobian @ delta + residual
        if np.abs(defect).max(initial=0.0) > tolerance * scale:
            delta = delta + self.solve(defect)
            defect = jacobian @ delta + residual
            error = float(np.abs(defect).max(initial=0.0))
            if error > tolerance * scale:
                logger.warning(f"Linear solve residual {error:.3e} above {tolerance:.1e} after refinement")
        return delta


@dataclass(frozen=True, eq=False)
class CondensedOperator:
    """Condensed trace operator with its interior (V_hat_0) and boundary blocks."""
    full: sparse.csr_matrix
    interior_dofs: np.ndarray
    boundary_dofs: np.ndarray

    @property
    def interior_block(self) -> np.ndarray:
        return self.full[self.interior_dofs][:, self.interior_dofs].toarray()

    @property
    def boundary_block(self) -> np.ndarray:
        return self.full[self.boundary_dofs][:, self.boundary_dofs].toarray()

    def asymmetry(self) -> float:
        """||S0 - S0^T||_inf / ||S0||_inf on the interior block (0 when empty)."""
        block = self.interior_block
        if block.size == 0:
            return 0.0
        scale = np.abs(block).sum(axis=1).max()
        if scale == 0.0:
            return 0.0
        return float(np.abs(block - block.T).sum(axis=1).max() / scale)


def condense_schur(base: DiscreteSolution) -> CondensedOperator:
    """Condense the Jacobian at a converged solution onto the trace DOFs."""
    problem = base.problem
    condensation = StaticCondensation(problem, assemble_blocks(problem, base.vector))
    operator = CondensedOperator(
        full=condensation.condensed,
        interior_dofs=problem.layout.interior_dofs,
        boundary_dofs=problem.layout.boundary_dofs,
    )
    logger.debug(f"Condensed {problem.method.label}: {operator.interior_dofs.size} interior trace DOFs")
    return operator
