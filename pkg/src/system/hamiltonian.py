"""Hamiltonian construction, closedness detection and Hamiltonian reconstruction."""

import logging
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import quad

from ..config import settings
from ..errors import ClosednessError, SystemDefinitionError, ValidationError
from .base import CanonicalSystem, HamiltonianDef

logger = logging.getLogger(__name__)

StateBatch = Tuple[np.ndarray, np.ndarray, np.ndarray]

FD_STEP = 1e-6
SAMPLE_COUNT = 50
SAMPLE_BOUND = 10.0


def sample_states(
    m: int,
    n: int,
    count: int = SAMPLE_COUNT,
    seed: Optional[int] = None,
    bound: float = SAMPLE_BOUND,
) -> StateBatch:
    """Pseudo-random states: x in [0,1]^m, u and sigma uniform in [-bound, bound]."""
    rng = np.random.default_rng(settings.seed if seed is None else seed)
    x = rng.uniform(0.0, 1.0, size=(count, m))
    u = rng.uniform(-bound, bound, size=(count, n))
    sigma = rng.uniform(-bound, bound, size=(count, n * m))
    return x, u, sigma


def _as_batch(system: CanonicalSystem, states: Union[StateBatch, Sequence[StateBatch]]) -> StateBatch:
    if isinstance(states, tuple) and len(states) == 3 and np.ndim(states[0]) == 2:
        return system.promote(*states)
    rows = list(states)
    if not rows:
        raise ValidationError("closedness needs at least one sample state", field="sample_states")
    x = np.array([np.ravel(s[0]) for s in rows])
    u = np.array([np.ravel(s[1]) for s in rows])
    sigma = np.array([np.ravel(s[2]) for s in rows])
    return system.promote(x, u, sigma)


def _fd_jacobian(fn, x: np.ndarray, z: np.ndarray, n: int) -> np.ndarray:
    """Central differences of fn(x, u, sigma) w.r.t. z = (u, sigma): shape (q, out, len(z))."""
    columns = []
    for k in range(z.shape[1]):
        step = FD_STEP * np.maximum(1.0, np.abs(z[:, k]))
        plus = z.copy()
        minus = z.copy()
        plus[:, k] += step
        minus[:, k] -= step
        diff = np.asarray(fn(x, plus[:, :n], plus[:, n:])) - np.asarray(fn(x, minus[:, :n], minus[:, n:]))
        columns.append(diff.reshape(z.shape[0], -1) / (2.0 * step[:, None]))
    return np.stack(columns, axis=2)


def check_jacobians(
    system: CanonicalSystem,
    n_states: int = SAMPLE_COUNT,
    seed: Optional[int] = None,
    bound: float = SAMPLE_BOUND,
) -> float:
    """Max relative error between supplied Jacobians and central differences."""
    x, u, sigma = sample_states(system.m, system.n, n_states, seed, bound)
    z = np.hstack([u, sigma])
    n = system.n
    analytic = system.jacobian(x, u, sigma)

    def coefficients(x_, u_, s_):
        return np.hstack([
            np.asarray(system.f(x_, u_, s_)).reshape(len(x_), -1),
            np.asarray(system.phi(x_, u_, s_)).reshape(len(x_), -1),
        ])

    numeric = _fd_jacobian(coefficients, x, z, n)
    error = np.abs(analytic - numeric) / np.maximum(1.0, np.abs(analytic))
    return float(error.max())


def from_hamiltonian(
    h: HamiltonianDef,
    m: int,
    n: int,
    label: str = "hamiltonian",
    n_checks: int = 20,
    seed: Optional[int] = None,
    tolerance: float = 1e-6,
) -> CanonicalSystem:
    """phi = dH/dsigma, f = dH/du; Jacobians from the Hessian or by differencing the gradients."""
    nm = n * m
    x, u, sigma = sample_states(m, n, n_checks, seed, bound=1.0)
    z = np.hstack([u, sigma])

    gradient = np.hstack([
        np.asarray(h.dH_du(x, u, sigma)).reshape(n_checks, n),
        np.asarray(h.dH_dsigma(x, u, sigma)).reshape(n_checks, nm),
    ])
    numeric = _fd_jacobian(lambda x_, u_, s_: np.asarray(h.H(x_, u_, s_)).reshape(len(x_), 1), x, z, n)[:, 0, :]
    mismatch = float((np.abs(gradient - numeric) / np.maximum(1.0, np.abs(gradient))).max())
    if mismatch > tolerance:
        raise SystemDefinitionError(
            f"Hamiltonian gradients inconsistent with H (relative error {mismatch:.3e})",
            system=label,
        )

    if h.hessian is not None:
        def hessian(x_, u_, s_):
            return np.asarray(h.hessian(x_, u_, s_)).reshape(len(x_), n + nm, n + nm)
        full_label = label
    else:
        def hessian(x_, u_, s_):
            z_ = np.hstack([u_, s_])
            def grad(xx, uu, ss):
                return np.hstack([
                    np.asarray(h.dH_du(xx, uu, ss)).reshape(len(xx), n),
                    np.asarray(h.dH_dsigma(xx, uu, ss)).reshape(len(xx), nm),
                ])
            return _fd_jacobian(grad, x_, z_, n)
        full_label = f"{label}[fd]"

    logger.debug(f"Built canonical system {full_label} (m={m}, n={n})")
    return CanonicalSystem(
        m=m,
        n=n,
        phi=h.dH_dsigma,
        f=h.dH_du,
        jac_phi_u=lambda x_, u_, s_: hessian(x_, u_, s_)[:, n:, :n],
        jac_phi_sigma=lambda x_, u_, s_: hessian(x_, u_, s_)[:, n:, n:],
        jac_f_u=lambda x_, u_, s_: hessian(x_, u_, s_)[:, :n, :n],
        jac_f_sigma=lambda x_, u_, s_: hessian(x_, u_, s_)[:, :n, n:],
        label=full_label,
        hamiltonian=h.H,
    )


def closedness_residual(system: CanonicalSystem, sample_states: Union[StateBatch, Iterable[StateBatch]]) -> float:
    """max over samples of ||J - J^T||_inf with J = d(f, phi)/d(u, sigma)."""
    x, u, sigma = _as_batch(system, sample_states)  # type: ignore[arg-type]
    jac = system.jacobian(x, u, sigma)
    skew = jac - np.transpose(jac, (0, 2, 1))
    return float(np.abs(skew).sum(axis=2).max())


def reconstruct_hamiltonian(
    system: CanonicalSystem,
    x: np.ndarray,
    u: np.ndarray,
    sigma: np.ndarray,
    tolerance: float = 1e-6,
) -> float:
    """H_rec = int_0^1 [phi(x, tu, t sigma) . sigma + f(x, tu, t sigma) . u] dt."""
    x = np.asarray(x, dtype=float).reshape(1, system.m)
    u = np.asarray(u, dtype=float).reshape(1, system.n)
    sigma = np.asarray(sigma, dtype=float).reshape(1, system.nm)

    path = np.linspace(0.0, 1.0, 5)
    residual = closedness_residual(
        system,
        (np.repeat(x, len(path), axis=0), path[:, None] * u, path[:, None] * sigma),
    )
    if residual > tolerance:
        raise ClosednessError(
            f"system {system.label} is not closed along the radial path (residual {residual:.3e})",
            residual=residual,
            system=system.label,
        )

    def integrand(t: float) -> float:
        phi = np.asarray(system.phi(x, t * u, t * sigma)).reshape(-1)
        f = np.asarray(system.f(x, t * u, t * sigma)).reshape(-1)
        return float(phi @ sigma[0] + f @ u[0])

    value, _ = quad(integrand, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    return float(value)
