"""Builtin canonical systems with analytic Jacobians."""

import logging
from typing import Any, Callable, Dict, Mapping, Optional, Union

import numpy as np

from ..errors import MethodError, SystemDefinitionError
from .base import CanonicalSystem

logger = logging.getLogger(__name__)

Scalar = Union[float, Callable[[np.ndarray], np.ndarray]]

BUILTIN_NAMES = (
    "poisson",
    "linear_elliptic",
    "semilinear_sine",
    "anisotropic",
    "coupled_pair",
    "non_hamiltonian_control",
)


def _spatial(value: Scalar, x: np.ndarray) -> np.ndarray:
    """Evaluate a constant or a function of x on a batch of points, shape (q,)."""
    if callable(value):
        return np.asarray(value(x), dtype=float).reshape(x.shape[0])
    return np.full(x.shape[0], float(value))


def _zeros(*shape: int) -> Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]:
    return lambda x, u, s: np.zeros((x.shape[0],) + shape)


def _constant(matrix: np.ndarray) -> Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]:
    return lambda x, u, s: np.broadcast_to(matrix, (x.shape[0],) + matrix.shape).copy()


def _spd(matrix: Any, size: int, name: str) -> np.ndarray:
    a = np.asarray(matrix, dtype=float).reshape(size, size)
    if not np.allclose(a, a.T, atol=1e-14, rtol=0.0):
        raise SystemDefinitionError(f"coefficient {name} must be symmetric", system=name)
    if np.linalg.eigvalsh(a).min() <= 0.0:
        raise SystemDefinitionError(f"coefficient {name} must be positive definite", system=name)
    return a


def _quadratic_flux_system(
    label: str,
    m: int,
    a: np.ndarray,
    source: Scalar = 0.0,
    reaction: Scalar = 0.0,
) -> CanonicalSystem:
    """phi = a sigma, f = source(x) - reaction(x) u for one field."""

    def hamiltonian(x, u, s):
        quadratic = 0.5 * np.einsum("qi,ij,qj->q", s, a, s)
        return quadratic + _spatial(source, x) * u[:, 0] - 0.5 * _spatial(reaction, x) * u[:, 0] ** 2

    return CanonicalSystem(
        m=m,
        n=1,
        phi=lambda x, u, s: s @ a.T,
        f=lambda x, u, s: (_spatial(source, x) - _spatial(reaction, x) * u[:, 0])[:, None],
        jac_phi_u=_zeros(m, 1),
        jac_phi_sigma=_constant(a),
        jac_f_u=lambda x, u, s: -_spatial(reaction, x)[:, None, None],
        jac_f_sigma=_zeros(1, m),
        label=label,
        is_linear=True,
        flux_coefficient=a,
        hamiltonian=hamiltonian,
    )


def poisson(m: int = 2, f: Scalar = 0.0) -> CanonicalSystem:
    """grad u = sigma, -div sigma = f(x)."""
    return _quadratic_flux_system("poisson", m, np.eye(m), source=f)


def linear_elliptic(m: int = 2, a: Optional[Any] = None, c: Scalar = 0.0, f: Scalar = 0.0) -> CanonicalSystem:
    """grad u = a sigma, -div sigma = f(x) - c(x) u."""
    coefficient = np.eye(m) if a is None else _spd(a, m, "linear_elliptic.a")
    return _quadratic_flux_system("linear_elliptic", m, coefficient, source=f, reaction=c)


def anisotropic(m: int = 2, a: Optional[Any] = None) -> CanonicalSystem:
    """grad u = a sigma, -div sigma = 0 with a constant SPD a."""
    if a is None:
        a = [[2.0, 1.0], [1.0, 3.0]] if m == 2 else [[2.0]]
    return _quadratic_flux_system("anisotropic", m, _spd(a, m, "anisotropic.a"))


def semilinear_sine(m: int = 2, kappa: float = 1.0) -> CanonicalSystem:
    """grad u = sigma, -div sigma = kappa sin(u); H = |sigma|^2/2 - kappa cos(u)."""
    kappa = float(kappa)
    return CanonicalSystem(
        m=m,
        n=1,
        phi=lambda x, u, s: s.copy(),
        f=lambda x, u, s: kappa * np.sin(u),
        jac_phi_u=_zeros(m, 1),
        jac_phi_sigma=_constant(np.eye(m)),
        jac_f_u=lambda x, u, s: (kappa * np.cos(u[:, 0]))[:, None, None],
        jac_f_sigma=_zeros(1, m),
        label="semilinear_sine",
        is_linear=False,
        flux_coefficient=np.eye(m),
        hamiltonian=lambda x, u, s: 0.5 * np.sum(s * s, axis=1) - kappa * np.cos(u[:, 0]),
    )


def coupled_pair(m: int = 2) -> CanonicalSystem:
    """Two fields with symmetric coupling f = (u2, u1); H = |sigma|^2/2 + u1 u2."""
    coupling = np.array([[0.0, 1.0], [1.0, 0.0]])
    return CanonicalSystem(
        m=m,
        n=2,
        phi=lambda x, u, s: s.copy(),
        f=lambda x, u, s: u @ coupling.T,
        jac_phi_u=_zeros(2 * m, 2),
        jac_phi_sigma=_constant(np.eye(2 * m)),
        jac_f_u=_constant(coupling),
        jac_f_sigma=_zeros(2, 2 * m),
        label="coupled_pair",
        is_linear=True,
        flux_coefficient=np.eye(2 * m),
        hamiltonian=lambda x, u, s: 0.5 * np.sum(s * s, axis=1) + u[:, 0] * u[:, 1],
    )


def non_hamiltonian_control(m: int = 2) -> CanonicalSystem:
    """phi = sigma, f = (u2, 0): the coefficient Jacobian is not symmetric."""
    coupling = np.array([[0.0, 1.0], [0.0, 0.0]])
    return CanonicalSystem(
        m=m,
        n=2,
        phi=lambda x, u, s: s.copy(),
        f=lambda x, u, s: u @ coupling.T,
        jac_phi_u=_zeros(2 * m, 2),
        jac_phi_sigma=_constant(np.eye(2 * m)),
        jac_f_u=_constant(coupling),
        jac_f_sigma=_zeros(2, 2 * m),
        label="non_hamiltonian_control",
        is_linear=True,
        flux_coefficient=np.eye(2 * m),
    )


_BUILDERS: Dict[str, Callable[..., CanonicalSystem]] = {
    "poisson": poisson,
    "linear_elliptic": linear_elliptic,
    "semilinear_sine": semilinear_sine,
    "anisotropic": anisotropic,
    "coupled_pair": coupled_pair,
    "non_hamiltonian_control": non_hamiltonian_control,
}


def builtin_system(name: str, parameters: Optional[Mapping[str, Any]] = None) -> CanonicalSystem:
    """Look up a builtin system by name."""
    builder = _BUILDERS.get(name)
    if builder is None:
        raise SystemDefinitionError(
            f"unknown system {name!r}; choose from {', '.join(BUILTIN_NAMES)}",
            system=name,
        )
    try:
        return builder(**dict(parameters or {}))
    except TypeError as e:
        raise SystemDefinitionError(f"bad parameters for {name}: {e}", system=name, original_error=e)


def _parse_value(raw: str) -> Any:
    if ";" in raw:
        entries = [float(v) for v in raw.split(";")]
        size = int(round(len(entries) ** 0.5))
        if size * size != len(entries):
            raise SystemDefinitionError(f"matrix literal {raw!r} is not square")
        return np.array(entries).reshape(size, size)
    try:
        return int(raw)
    except ValueError:
        return float(raw)


def parse_system_spec(spec: str, m: Optional[int] = None) -> CanonicalSystem:
    """Parse "name[:key=value,...]"; matrices are row-major with ';' separators."""
    name, _, tail = spec.partition(":")
    parameters: Dict[str, Any] = {}
    for item in filter(None, tail.split(",")):
        key, sep, raw = item.partition("=")
        if not sep:
            raise SystemDefinitionError(f"malformed system parameter {item!r}", system=name)
        try:
            parameters[key.strip()] = _parse_value(raw.strip())
        except ValueError as e:
            raise SystemDefinitionError(f"malformed system parameter {item!r}", system=name, original_error=e)
    if m is not None:
        parameters.setdefault("m", m)
    return builtin_system(name.strip(), parameters)


def default_ip_coefficient(system: CanonicalSystem) -> np.ndarray:
    """a = A^{-1} for systems with phi = A sigma, so that sigma = a grad u."""
    if system.flux_coefficient is None:
        raise MethodError(
            f"system {system.label} has no constant flux coefficient; supply coeff_a explicitly",
        )
    return np.linalg.inv(system.flux_coefficient)
