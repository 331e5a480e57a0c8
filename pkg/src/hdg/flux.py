"""
Numerical flux closures.

Every closure is linear in the unknowns, so the flux on a facet of a cell is
stored as two operators acting on the cell's local vector [u, sigma, sigma_hat]
and on the facet's trace coefficients (ordered i * NT + t):

    sigma_hat[q, i, mu] = local[q, i, mu, :] @ x_K + trace[q, i, mu, :] @ uhat_e
"""
import logging
from dataclasses import dataclass

import numpy as np

from ..errors import MethodError
from .element import ElementData, FacetData
from .methods import FluxMode, IP_FAMILIES, LDG_FAMILIES, MethodFamily
from .spaces import LocalSpaces

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FacetFlux:
    local: np.ndarray
    trace: np.ndarray
    normal: np.ndarray

    @property
    def normal_local(self) -> np.ndarray:
        """(q, n, n_local): sigma_hat . n acting on the local vector."""
        return np.einsum("qimc,m->qic", self.local, self.normal)

    @property
    def normal_trace(self) -> np.ndarray:
        return np.einsum("qimc,m->qic", self.trace, self.normal)

    def values(self, x_local: np.ndarray, trace_local: np.ndarray) -> np.ndarray:
        """sigma_hat at the facet quadrature points, shape (q, n, m)."""
        return self.local @ x_local + self.trace @ trace_local

    def normal_values(self, x_local: np.ndarray, trace_local: np.ndarray) -> np.ndarray:
        """sigma_hat . n at the facet quadrature points, shape (q, n)."""
        return self.values(x_local, trace_local) @ self.normal


def build_facet_flux(spaces: LocalSpaces, element: ElementData, facet: FacetData) -> FacetFlux:
    n, m = spaces.n, spaces.m
    nq = facet.weights.size
    nv, ns, nt = spaces.dim_v, spaces.dim_sigma, spaces.dim_trace
    local = np.zeros((nq, n, m, spaces.n_local))
    trace = np.zeros((nq, n, m, n * nt))
    normal = facet.normal
    family = spaces.family

    u0 = spaces.u_slice.start
    s0 = spaces.sigma_slice.start
    w0 = spaces.hat_slice.start

    if family in (MethodFamily.RT_H, MethodFamily.BDM_H) or family in LDG_FAMILIES:
        for i in range(n):
            local[:, i, :, s0 + i * ns:s0 + (i + 1) * ns] = np.transpose(facet.sigma, (0, 2, 1))

    if family in IP_FAMILIES:
        a = element.coefficient
        if a is None:
            raise MethodError("IP closure needs a per-cell coefficient", family=family.value)
        a4 = a.reshape(n, m, n, m)
        for j in range(n):
            local[:, :, :, u0 + j * nv:u0 + (j + 1) * nv] = np.einsum("imv,qkv->qimk", a4[:, :, j, :], facet.v_grad)

    if family in LDG_FAMILIES or family in IP_FAMILIES:
        lam = facet.penalty
        for i in range(n):
            local[:, i, :, u0 + i * nv:u0 + (i + 1) * nv] -= lam * np.einsum("m,qk->qmk", normal, facet.v)
            trace[:, i, :, i * nt:(i + 1) * nt] += lam * np.einsum("m,qt->qmt", normal, facet.trace)

    if spaces.flux_mode == FluxMode.UNKNOWN:
        nh = spaces.dim_hat
        for i in range(n):
            local[:, i, :, w0 + i * nh:w0 + (i + 1) * nh] = np.einsum("m,qh->qmh", normal, facet.hat)

    return FacetFlux(local=local, trace=trace, normal=normal)


def flux_sigma_hat(
    spaces: LocalSpaces,
    element: ElementData,
    local_facet: int,
    x_local: np.ndarray,
    trace_local: np.ndarray,
) -> np.ndarray:
    """
    Closed-form numerical flux on a facet of a cell, shape (q, n, m).

    RT_H/BDM_H: sigma; LDG_H_*: sigma + lambda (uhat - u) n;
    IP_H/IP_H_LIKE: a grad u + lambda (uhat - u) n.
    """
    if spaces.flux_mode != FluxMode.ELIMINATED:
        raise MethodError(
            f"{spaces.family.value} solves for the flux; it has no closed form",
            family=spaces.family.value,
            degree=spaces.degree,
        )
    facet = element.facets[local_facet]
    return build_facet_flux(spaces, element, facet).values(x_local, trace_local)
