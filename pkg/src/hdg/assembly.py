"""
Residual and Jacobian assembly of the hybridized flux formulation.

Per cell K with local unknowns x_K = [u, sigma, sigma_hat] and traces uhat:

    flux      int_dK uhat (tau . n) - int_K (u div tau + phi(x, u, sigma) . tau)
    balance   int_dK (sigma_hat . n) v - int_K (sigma . grad v - f(x, u, sigma) v)
    condition int_dK (uhat - u) w                      (CG_H, NC_H only)

and per trace DOF g: the conservativity row sum_K int_dK (sigma_hat . n) phi_g on
interior DOFs, the Dirichlet row uhat_g - data_g on boundary DOFs. The global
vector holds every cell's local block, cell by cell, followed by the traces.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from ..errors import AssemblyError, MethodError, ValidationError
from ..geometry import Mesh
from ..system import CanonicalSystem, SourceProbe, default_ip_coefficient
from .element import ElementData, tabulate_element
from .flux import FacetFlux, build_facet_flux
from .methods import IP_FAMILIES, MethodSpec
from .spaces import LocalSpaces, TraceLayout, build_trace_layout, local_space_table

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BlockIndexMap:
    """Positions of cell blocks and trace DOFs in the global vector."""
    n_cells: int
    n_local: int
    n_trace: int
    spaces: LocalSpaces

    @property
    def trace_offset(self) -> int:
        return self.n_cells * self.n_local

    @property
    def size(self) -> int:
        return self.trace_offset + self.n_trace

    def cell_slice(self, cell: int) -> slice:
        return slice(cell * self.n_local, (cell + 1) * self.n_local)

    @property
    def trace_slice(self) -> slice:
        return slice(self.trace_offset, self.size)

    def describe(self, index: int) -> Tuple[str, int, int]:
        """(kind, cell or -1, local index) of a global row or column."""
        if index >= self.trace_offset:
            return "trace", -1, index - self.trace_offset
        cell, local = divmod(index, self.n_local)
        return "cell", cell, local


@dataclass(frozen=True, eq=False)
class CellOperators:
    """State-independent parts of a cell's equations."""
    dofs: np.ndarray
    facet_positions: Tuple[np.ndarray, ...]
    linear: np.ndarray
    coupling: np.ndarray
    cons_local: np.ndarray
    cons_trace: np.ndarray
    fluxes: Tuple[FacetFlux, ...]


@dataclass(frozen=True, eq=False)
class CellBlocks:
    """Linearization of one cell: rows of the cell and its conservativity contributions."""
    cell: int
    dofs: np.ndarray
    residual: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    trace_residual: np.ndarray


class HdgProblem:
    """Mesh, method and system together with tabulated elements and trace numbering."""

    def __init__(self, mesh: Mesh, method: MethodSpec, system: CanonicalSystem):
        if system.m != mesh.dim:
            raise ValidationError(
                f"system {system.label} has m={system.m} but the mesh has dimension {mesh.dim}",
                field="system",
            )
        if method.family in IP_FAMILIES:
            if method.coeff_a is None:
                method = method.with_coefficient(default_ip_coefficient(system))
            for cell in range(mesh.n_cells):
                a = method.coefficient_for(cell)
                if a.shape != (system.nm, system.nm):
                    raise MethodError(
                        f"IP coefficient must be {system.nm}x{system.nm}, got {a.shape}",
                        family=method.family.value,
                    )

        self.mesh = mesh
        self.method = method
        self.system = system
        self.spaces = local_space_table(method, mesh.dim, system.n)
        self.layout: TraceLayout = build_trace_layout(mesh, self.spaces)
        self.index = BlockIndexMap(
            n_cells=mesh.n_cells,
            n_local=self.spaces.n_local,
            n_trace=self.layout.n_dofs,
            spaces=self.spaces,
        )
        self.elements: List[ElementData] = [
            tabulate_element(mesh, self.spaces, method, cell) for cell in range(mesh.n_cells)
        ]
        self.operators: List[CellOperators] = [self._cell_operators(e) for e in self.elements]
        logger.info(
            f"Set up {method.label} for {system.label} on {mesh.n_cells} cells: "
            f"{self.index.size} unknowns ({self.layout.n_dofs} traces, "
            f"{self.layout.boundary_dofs.size} on the boundary)"
        )

    @property
    def size(self) -> int:
        return self.index.size

    # -- vector views -------------------------------------------------

    def local_vector(self, vector: np.ndarray, cell: int) -> np.ndarray:
        return vector[self.index.cell_slice(cell)]

    def trace_vector(self, vector: np.ndarray) -> np.ndarray:
        return vector[self.index.trace_slice]

    def cell_trace(self, vector: np.ndarray, cell: int) -> np.ndarray:
        return self.trace_vector(vector)[self.operators[cell].dofs]

    def facet_trace(self, vector: np.ndarray, cell: int, local_facet: int) -> np.ndarray:
        ops = self.operators[cell]
        return self.cell_trace(vector, cell)[ops.facet_positions[local_facet]]

    def u_coefficients(self, vector: np.ndarray, cell: int) -> np.ndarray:
        return self.local_vector(vector, cell)[self.spaces.u_slice].reshape(self.system.n, -1)

    def sigma_coefficients(self, vector: np.ndarray, cell: int) -> np.ndarray:
        return self.local_vector(vector, cell)[self.spaces.sigma_slice].reshape(self.system.n, -1)

    def hat_coefficients(self, vector: np.ndarray, cell: int) -> np.ndarray:
        return self.local_vector(vector, cell)[self.spaces.hat_slice].reshape(self.system.n, -1)

    def facet_values(self, vector: np.ndarray, cell: int, local_facet: int) -> Dict[str, np.ndarray]:
        """u, sigma . n, uhat and sigma_hat . n of a cell on a facet, each (q, n)."""
        facet = self.elements[cell].facets[local_facet]
        flux = self.operators[cell].fluxes[local_facet]
        x = self.local_vector(vector, cell)
        t = self.facet_trace(vector, cell, local_facet)
        n, nt = self.system.n, self.spaces.dim_trace
        return {
            "u": facet.v @ self.u_coefficients(vector, cell).T,
            "sigma_n": facet.sigma_n @ self.sigma_coefficients(vector, cell).T,
            "u_hat": facet.trace @ t.reshape(n, nt).T,
            "sigma_hat_n": flux.normal_values(x, t),
        }

    def cell_values(self, vector: np.ndarray, cell: int) -> Tuple[np.ndarray, np.ndarray]:
        """u (q, n) and sigma (q, n*m) at the cell quadrature points."""
        element = self.elements[cell]
        u = element.v @ self.u_coefficients(vector, cell).T
        sigma = np.einsum("qkm,ik->qim", element.sigma, self.sigma_coefficients(vector, cell))
        return u, sigma.reshape(u.shape[0], -1)

    # -- operators ----------------------------------------------------

    def _cell_operators(self, element: ElementData) -> CellOperators:
        sp = self.spaces
        n = sp.n
        eye = np.eye(n)

        dofs_per_facet = [self.layout.facet_dofs(f.facet_id) for f in element.facets]
        dofs = np.unique(np.concatenate(dofs_per_facet))
        positions = tuple(np.searchsorted(dofs, d) for d in dofs_per_facet)
        n_tr = dofs.size

        linear = np.zeros((sp.n_local, sp.n_local))
        coupling = np.zeros((sp.n_local, n_tr))
        cons_local = np.zeros((n_tr, sp.n_local))
        cons_trace = np.zeros((n_tr, n_tr))

        w = element.weights
        flux_rows, balance_rows, condition_rows = sp.flux_rows, sp.balance_rows, sp.condition_rows

        linear[flux_rows, sp.u_slice] = np.kron(
            eye, -np.einsum("q,qk,ql->kl", w, element.sigma_div, element.v)
        )
        linear[balance_rows, sp.sigma_slice] = np.kron(
            eye, -np.einsum("q,qkm,qlm->kl", w, element.v_grad, element.sigma)
        )

        fluxes = []
        for facet, pos in zip(element.facets, positions):
            flux = build_facet_flux(sp, element, facet)
            fluxes.append(flux)
            wf = facet.weights
            gn_local = flux.normal_local
            gn_trace = flux.normal_trace

            coupling[flux_rows, pos] += np.kron(eye, np.einsum("q,qk,qt->kt", wf, facet.sigma_n, facet.trace))
            linear[balance_rows, :] += np.einsum("q,qic,qk->ikc", wf, gn_local, facet.v).reshape(sp.n_u, sp.n_local)
            coupling[balance_rows, pos] += np.einsum("q,qic,qk->ikc", wf, gn_trace, facet.v).reshape(sp.n_u, -1)

            if sp.n_hat:
                linear[condition_rows, sp.u_slice] -= np.kron(eye, np.einsum("q,qh,ql->hl", wf, facet.hat, facet.v))
                coupling[condition_rows, pos] += np.kron(eye, np.einsum("q,qh,qt->ht", wf, facet.hat, facet.trace))

            cons_local[pos, :] += np.einsum("q,qic,qt->itc", wf, gn_local, facet.trace).reshape(len(pos), -1)
            cons_trace[np.ix_(pos, pos)] += np.einsum("q,qic,qt->itc", wf, gn_trace, facet.trace).reshape(len(pos), -1)

        return CellOperators(
            dofs=dofs,
            facet_positions=positions,
            linear=linear,
            coupling=coupling,
            cons_local=cons_local,
            cons_trace=cons_trace,
            fluxes=tuple(fluxes),
        )

    def _nonlinear(self, element: ElementData, x_local: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """phi and f volume terms of a cell and their derivative w.r.t. x_local."""
        sp = self.spaces
        n, m = sp.n, sp.m
        nv, ns = sp.dim_v, sp.dim_sigma
        q = element.weights.size
        w = element.weights

        u = element.v @ x_local[sp.u_slice].reshape(n, nv).T
        sigma = np.einsum("qkm,ik->qim", element.sigma, x_local[sp.sigma_slice].reshape(n, ns)).reshape(q, n * m)
        ev = self.system.evaluate(element.points, u, sigma)

        residual = np.zeros(sp.n_local)
        jacobian = np.zeros((sp.n_local, sp.n_local))

        residual[sp.flux_rows] = -np.einsum("q,qim,qkm->ik", w, ev.phi.reshape(q, n, m), element.sigma).ravel()
        residual[sp.balance_rows] = np.einsum("q,qi,qk->ik", w, ev.f, element.v).ravel()

        jacobian[sp.flux_rows, sp.u_slice] = -np.einsum(
            "q,qimj,qkm,ql->ikjl", w, ev.phi_u.reshape(q, n, m, n), element.sigma, element.v, optimize=True
        ).reshape(sp.n_sigma, sp.n_u)
        jacobian[sp.flux_rows, sp.sigma_slice] = -np.einsum(
            "q,qimjv,qkm,qlv->ikjl", w, ev.phi_sigma.reshape(q, n, m, n, m), element.sigma, element.sigma, optimize=True
        ).reshape(sp.n_sigma, sp.n_sigma)
        jacobian[sp.balance_rows, sp.u_slice] = np.einsum(
            "q,qij,qk,ql->ikjl", w, ev.f_u, element.v, element.v, optimize=True
        ).reshape(sp.n_u, sp.n_u)
        jacobian[sp.balance_rows, sp.sigma_slice] = np.einsum(
            "q,qijv,qk,qlv->ikjl", w, ev.f_sigma.reshape(q, n, n, m), element.v, element.sigma, optimize=True
        ).reshape(sp.n_u, sp.n_sigma)
        return residual, jacobian

    def source_terms(self, cell: int, v: np.ndarray, tau: np.ndarray, probe: SourceProbe) -> np.ndarray:
        """-int psi . tau_test on flux rows, +int g v_test on balance rows."""
        sp = self.spaces
        element = self.elements[cell]
        n, m = sp.n, sp.m
        q = element.weights.size
        w = element.weights
        psi = np.asarray(probe.psi(element.points, v, tau), dtype=float).reshape(q, n, m)
        g = np.asarray(probe.g(element.points, v, tau), dtype=float).reshape(q, n)
        source = np.zeros(sp.n_local)
        source[sp.flux_rows] = -np.einsum("q,qim,qkm->ik", w, psi, element.sigma).ravel()
        source[sp.balance_rows] = np.einsum("q,qi,qk->ik", w, g, element.v).ravel()
        return source

    def cell_blocks(self, vector: np.ndarray, cell: int) -> CellBlocks:
        ops = self.operators[cell]
        x = self.local_vector(vector, cell)
        t = self.cell_trace(vector, cell)
        nl_residual, nl_jacobian = self._nonlinear(self.elements[cell], x)
        return CellBlocks(
            cell=cell,
            dofs=ops.dofs,
            residual=ops.linear @ x + ops.coupling @ t + nl_residual,
            A=ops.linear + nl_jacobian,
            B=ops.coupling,
            C=ops.cons_local,
            D=ops.cons_trace,
            trace_residual=ops.cons_local @ x + ops.cons_trace @ t,
        )


def _check_square(problem: HdgProblem, blocks: Sequence[CellBlocks]) -> None:
    rows = sum(b.residual.size for b in blocks) + problem.layout.n_dofs
    if rows != problem.size:
        raise AssemblyError(f"assembled {rows} equations for {problem.size} unknowns")


def assemble_blocks(problem: HdgProblem, vector: np.ndarray) -> List[CellBlocks]:
    blocks = [problem.cell_blocks(vector, cell) for cell in range(problem.mesh.n_cells)]
    _check_square(problem, blocks)
    return blocks


def global_residual(
    problem: HdgProblem,
    vector: np.ndarray,
    blocks: Sequence[CellBlocks],
    boundary_values: np.ndarray,
    sources: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Stack cell residuals, conservativity rows and Dirichlet rows."""
    residual = np.zeros(problem.size)
    for b in blocks:
        residual[problem.index.cell_slice(b.cell)] = b.residual
    trace = np.zeros(problem.layout.n_dofs)
    for b in blocks:
        np.add.at(trace, b.dofs, b.trace_residual)
    boundary = problem.layout.boundary_dofs
    trace[boundary] = problem.trace_vector(vector)[boundary] - boundary_values
    residual[problem.index.trace_slice] = trace
    if sources is not None:
        residual += sources
    return residual


def global_jacobian(problem: HdgProblem, blocks: Sequence[CellBlocks]) -> sparse.csr_matrix:
    """Sparse Jacobian in the block layout of the global vector."""
    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    vals: List[np.ndarray] = []
    offset = problem.index.trace_offset
    interior = np.zeros(problem.layout.n_dofs, dtype=bool)
    interior[problem.layout.interior_dofs] = True

    def add(r: np.ndarray, c: np.ndarray, block: np.ndarray) -> None:
        rr, cc = np.meshgrid(r, c, indexing="ij")
        rows.append(rr.ravel())
        cols.append(cc.ravel())
        vals.append(block.ravel())

    for b in blocks:
        local = np.arange(problem.index.cell_slice(b.cell).start, problem.index.cell_slice(b.cell).stop)
        add(local, local, b.A)
        add(local, offset + b.dofs, b.B)
        keep = interior[b.dofs]
        add(offset + b.dofs[keep], local, b.C[keep])
        add(offset + b.dofs[keep], offset + b.dofs, b.D[keep])

    boundary = offset + problem.layout.boundary_dofs
    rows.append(boundary)
    cols.append(boundary)
    vals.append(np.ones(boundary.size))

    return sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(problem.size, problem.size),
    ).tocsr()


def source_vector(problem: HdgProblem, vector: np.ndarray, probe: SourceProbe) -> np.ndarray:
    """Incremental source contributions evaluated at the (linearized) state `vector`."""
    sources = np.zeros(problem.size)
    for cell in range(problem.mesh.n_cells):
        v, tau = problem.cell_values(vector, cell)
        sources[problem.index.cell_slice(cell)] = problem.source_terms(cell, v, tau, probe)
    return sources


@dataclass(frozen=True, eq=False)
class DiscreteSolution:
    """
    A converged solution (u, sigma, sigma_hat, uhat) in the global block layout.

    `boundary_values` is aligned with `problem.layout.boundary_dofs`.
    """
    problem: HdgProblem
    vector: np.ndarray
    boundary_values: np.ndarray
    iterations: int = 0
    residual_norm: float = 0.0
    tolerance: float = 0.0
    history: Tuple[float, ...] = field(default=())

    @property
    def mesh(self) -> Mesh:
        return self.problem.mesh

    @property
    def method(self) -> MethodSpec:
        return self.problem.method

    @property
    def system(self) -> CanonicalSystem:
        return self.problem.system

    @property
    def trace(self) -> np.ndarray:
        return self.problem.trace_vector(self.vector)

    def u(self, cell: int) -> np.ndarray:
        return self.problem.u_coefficients(self.vector, cell)

    def sigma(self, cell: int) -> np.ndarray:
        return self.problem.sigma_coefficients(self.vector, cell)

    def sigma_hat(self, cell: int) -> np.ndarray:
        return self.problem.hat_coefficients(self.vector, cell)

    def evaluate(self, cell: int, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """u (q, n) and sigma (q, n, m) at physical points of a cell."""
        element = self.problem.elements[cell]
        spaces = self.problem.spaces
        reference = element.to_reference(np.atleast_2d(points))
        table = spaces.v_basis.tabulate(reference, with_gradients=False)
        vector_table = spaces.sigma_basis.tabulate_vector(reference)
        sigma_values = np.einsum("ed,qkd->qke", element.jacobian, vector_table.values)
        u = table.values @ self.u(cell).T
        sigma = np.einsum("qkm,ik->qim", sigma_values, self.sigma(cell))
        return u, sigma

    def summary(self) -> Dict[str, object]:
        return {
            "method": self.method.label,
            "system": self.system.label,
            "cells": self.mesh.n_cells,
            "unknowns": self.problem.size,
            "iterations": self.iterations,
            "residual": self.residual_norm,
        }


def assemble_residual_jacobian(
    problem: HdgProblem,
    state: DiscreteSolution,
    sources: Optional[SourceProbe] = None,
) -> Tuple[np.ndarray, sparse.csr_matrix, BlockIndexMap]:
    """Residual vector, sparse Jacobian and block index map at a state."""
    blocks = assemble_blocks(problem, state.vector)
    extra = source_vector(problem, state.vector, sources) if sources is not None else None
    residual = global_residual(problem, state.vector, blocks, state.boundary_values, extra)
    return residual, global_jacobian(problem, blocks), problem.index
