"""Canonical systems, Hamiltonians and closedness checks."""

from .base import CanonicalSystem, HamiltonianDef, SourceProbe, SystemEvaluation
from .catalog import (
    BUILTIN_NAMES,
    anisotropic,
    builtin_system,
    coupled_pair,
    default_ip_coefficient,
    linear_elliptic,
    non_hamiltonian_control,
    parse_system_spec,
    poisson,
    semilinear_sine,
)
from .hamiltonian import (
    check_jacobians,
    closedness_residual,
    from_hamiltonian,
    reconstruct_hamiltonian,
    sample_states,
)

__all__ = [
    "CanonicalSystem",
    "HamiltonianDef",
    "SourceProbe",
    "SystemEvaluation",
    "BUILTIN_NAMES",
    "builtin_system",
    "parse_system_spec",
    "default_ip_coefficient",
    "poisson",
    "linear_elliptic",
    "anisotropic",
    "semilinear_sine",
    "coupled_pair",
    "non_hamiltonian_control",
    "from_hamiltonian",
    "closedness_residual",
    "reconstruct_hamiltonian",
    "check_jacobians",
    "sample_states",
]
