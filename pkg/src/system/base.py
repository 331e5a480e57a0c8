"""
Canonical first-order systems grad u = phi(x, u, sigma), -div sigma = f(x, u, sigma).

All maps are batched: x has shape (q, m), u (q, n) and sigma (q, n*m) with sigma
flattened row-major as sigma[i][mu] (field index i outer, direction mu inner).
Returned arrays carry the same leading batch axis. Maps must be pure functions;
they may be called concurrently from worker threads.
"""
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from ..errors import SystemDefinitionError

BatchMap = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class SystemEvaluation:
    """Pointwise values and Jacobians of a canonical system at a batch of states."""
    phi: np.ndarray
    f: np.ndarray
    phi_u: np.ndarray
    phi_sigma: np.ndarray
    f_u: np.ndarray
    f_sigma: np.ndarray


@dataclass(frozen=True, eq=False)
class CanonicalSystem:
    """The maps (phi, f) and their Jacobians for m space dimensions and n fields."""
    m: int
    n: int
    phi: BatchMap
    f: BatchMap
    jac_phi_u: BatchMap
    jac_phi_sigma: BatchMap
    jac_f_u: BatchMap
    jac_f_sigma: BatchMap
    label: str = "system"
    is_linear: bool = False
    flux_coefficient: Optional[np.ndarray] = None
    hamiltonian: Optional[BatchMap] = None

    @property
    def nm(self) -> int:
        return self.n * self.m

    def promote(self, x: np.ndarray, u: np.ndarray, sigma: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Accept single states or batches and return batched arrays."""
        x = np.asarray(x, dtype=float).reshape(-1, self.m)
        u = np.asarray(u, dtype=float).reshape(-1, self.n)
        sigma = np.asarray(sigma, dtype=float).reshape(-1, self.nm)
        if not (x.shape[0] == u.shape[0] == sigma.shape[0]):
            raise SystemDefinitionError(
                f"batch sizes differ: x {x.shape}, u {u.shape}, sigma {sigma.shape}",
                system=self.label,
            )
        return x, u, sigma

    def evaluate(self, x: np.ndarray, u: np.ndarray, sigma: np.ndarray) -> SystemEvaluation:
        x, u, sigma = self.promote(x, u, sigma)
        q = x.shape[0]
        result = SystemEvaluation(
            phi=np.asarray(self.phi(x, u, sigma), dtype=float).reshape(q, self.nm),
            f=np.asarray(self.f(x, u, sigma), dtype=float).reshape(q, self.n),
            phi_u=np.asarray(self.jac_phi_u(x, u, sigma), dtype=float).reshape(q, self.nm, self.n),
            phi_sigma=np.asarray(self.jac_phi_sigma(x, u, sigma), dtype=float).reshape(q, self.nm, self.nm),
            f_u=np.asarray(self.jac_f_u(x, u, sigma), dtype=float).reshape(q, self.n, self.n),
            f_sigma=np.asarray(self.jac_f_sigma(x, u, sigma), dtype=float).reshape(q, self.n, self.nm),
        )
        return result

    def jacobian(self, x: np.ndarray, u: np.ndarray, sigma: np.ndarray) -> np.ndarray:
        """J = d(f, phi)/d(u, sigma) with shape (q, n + nm, n + nm)."""
        ev = self.evaluate(x, u, sigma)
        top = np.concatenate([ev.f_u, ev.f_sigma], axis=2)
        bottom = np.concatenate([ev.phi_u, ev.phi_sigma], axis=2)
        return np.concatenate([top, bottom], axis=1)


@dataclass(frozen=True, eq=False)
class HamiltonianDef:
    """A Hamiltonian H(x, u, sigma) with its gradients and an optional Hessian."""
    H: BatchMap
    dH_du: BatchMap
    dH_dsigma: BatchMap
    hessian: Optional[BatchMap] = None


@dataclass(frozen=True, eq=False)
class SourceProbe:
    """Incremental sources psi(x, v, tau) in R^{nm} and g(x, v, tau) in R^n."""
    psi: BatchMap
    g: BatchMap

    @classmethod
    def constant(cls, psi: np.ndarray, g: np.ndarray) -> "SourceProbe":
        psi = np.asarray(psi, dtype=float).ravel()
        g = np.asarray(g, dtype=float).ravel()
        return cls(
            psi=lambda x, v, tau: np.broadcast_to(psi, (np.shape(x)[0], psi.size)),
            g=lambda x, v, tau: np.broadcast_to(g, (np.shape(x)[0], g.size)),
        )
