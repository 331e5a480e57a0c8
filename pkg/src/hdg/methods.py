"""Method families, penalty functions and per-cell IP coefficients."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Mapping, Optional, Tuple, Union

import numpy as np

from ..config import settings
from ..errors import MethodError
from ..geometry import Mesh

logger = logging.getLogger(__name__)

PenaltyKey = Tuple[int, int]
PenaltyValue = Union[float, Mapping[PenaltyKey, float], Callable[[int, int], float]]
CoefficientValue = Union[None, np.ndarray, Mapping[int, np.ndarray]]


class MethodFamily(str, Enum):
    """Hybridized method families."""
    RT_H = "RT_H"
    BDM_H = "BDM_H"
    LDG_H_A = "LDG_H_A"
    LDG_H_B = "LDG_H_B"
    LDG_H_C = "LDG_H_C"
    CG_H = "CG_H"
    NC_H = "NC_H"
    IP_H = "IP_H"
    IP_H_LIKE = "IP_H_LIKE"


class FluxMode(str, Enum):
    """Whether the numerical flux is closed in terms of (u, sigma, u_hat) or solved for."""
    ELIMINATED = "eliminated"
    UNKNOWN = "unknown"


FAMILY_ALIASES: Dict[str, MethodFamily] = {
    "rth": MethodFamily.RT_H,
    "bdmh": MethodFamily.BDM_H,
    "ldgh-a": MethodFamily.LDG_H_A,
    "ldgh-b": MethodFamily.LDG_H_B,
    "ldgh-c": MethodFamily.LDG_H_C,
    "cgh": MethodFamily.CG_H,
    "nch": MethodFamily.NC_H,
    "iph": MethodFamily.IP_H,
    "iph-like": MethodFamily.IP_H_LIKE,
}

ZERO_DEGREE_FAMILIES = frozenset({MethodFamily.RT_H, MethodFamily.LDG_H_B})
LDG_FAMILIES = frozenset({MethodFamily.LDG_H_A, MethodFamily.LDG_H_B, MethodFamily.LDG_H_C})
IP_FAMILIES = frozenset({MethodFamily.IP_H, MethodFamily.IP_H_LIKE})
UNKNOWN_FLUX_FAMILIES = frozenset({MethodFamily.CG_H, MethodFamily.NC_H})


def parse_family(name: Union[str, MethodFamily]) -> MethodFamily:
    """Accept CLI aliases ("ldgh-b") as well as enum names ("LDG_H_B")."""
    if isinstance(name, MethodFamily):
        return name
    key = str(name).strip()
    if key.lower() in FAMILY_ALIASES:
        return FAMILY_ALIASES[key.lower()]
    try:
        return MethodFamily(key.upper().replace("-", "_"))
    except ValueError as e:
        raise MethodError(f"unknown method family {name!r}", family=str(name)) from e


def _check_spd(matrix: np.ndarray, label: str) -> np.ndarray:
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise MethodError(f"coefficient {label} must be a square matrix, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-13 * max(1.0, np.abs(a).max())):
        raise MethodError(f"coefficient {label} must be symmetric")
    if np.linalg.eigvalsh(a).min() <= 0.0:
        raise MethodError(f"coefficient {label} must be positive definite")
    return a


@dataclass(frozen=True, eq=False)
class MethodSpec:
    """
    A method family with its degree, penalty function and optional IP coefficient.

    The penalty is a constant, a mapping (cell, local facet) -> lambda with
    `default_penalty` for missing keys, or a callable of (cell, local facet).
    The IP coefficient is an (nm x nm) SPD matrix or a mapping cell -> matrix;
    spatially varying coefficients are not accepted.
    """
    family: MethodFamily
    degree: int
    penalty: PenaltyValue = field(default_factory=lambda: settings.default_penalty)
    coeff_a: CoefficientValue = None
    default_penalty: float = field(default_factory=lambda: settings.default_penalty)

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", parse_family(self.family))
        if not isinstance(self.degree, (int, np.integer)) or isinstance(self.degree, bool):
            raise MethodError("degree must be an integer", family=self.family.value)
        minimum = 0 if self.family in ZERO_DEGREE_FAMILIES else 1
        if self.degree < minimum:
            raise MethodError(
                f"{self.family.value} requires degree >= {minimum}, got {self.degree}",
                family=self.family.value,
                degree=int(self.degree),
            )
        if callable(self.coeff_a):
            raise MethodError(
                "IP coefficient must be constant on each cell; callables are rejected",
                family=self.family.value,
            )
        if isinstance(self.coeff_a, Mapping):
            object.__setattr__(
                self,
                "coeff_a",
                {int(c): _check_spd(a, f"coeff_a[{c}]") for c, a in self.coeff_a.items()},
            )
        elif self.coeff_a is not None:
            object.__setattr__(self, "coeff_a", _check_spd(self.coeff_a, "coeff_a"))

    @property
    def flux_mode(self) -> FluxMode:
        return FluxMode.UNKNOWN if self.family in UNKNOWN_FLUX_FAMILIES else FluxMode.ELIMINATED

    @property
    def uses_penalty(self) -> bool:
        return self.family in LDG_FAMILIES or self.family in IP_FAMILIES

    @property
    def label(self) -> str:
        return f"{self.family.value}(r={self.degree})"

    def penalty_for(self, cell: int, local_facet: int) -> float:
        """lambda on the (cell, local facet) pair."""
        if callable(self.penalty):
            value = self.penalty(cell, local_facet)
        elif isinstance(self.penalty, Mapping):
            value = self.penalty.get((cell, local_facet), self.default_penalty)
        else:
            value = self.penalty
        value = float(value)
        if not np.isfinite(value):
            raise MethodError(f"penalty on ({cell}, {local_facet}) is not finite", family=self.family.value)
        return value

    def coefficient_for(self, cell: int) -> Optional[np.ndarray]:
        if isinstance(self.coeff_a, Mapping):
            try:
                return self.coeff_a[cell]
            except KeyError as e:
                raise MethodError(f"no IP coefficient for cell {cell}", family=self.family.value) from e
        return self.coeff_a

    def with_coefficient(self, coeff_a: CoefficientValue) -> "MethodSpec":
        return MethodSpec(
            family=self.family,
            degree=self.degree,
            penalty=self.penalty,
            coeff_a=coeff_a,
            default_penalty=self.default_penalty,
        )


def two_sided_penalty(mesh: Mesh, plus: float, minus: float) -> Dict[PenaltyKey, float]:
    """lambda_plus on the plus side of every facet, lambda_minus on the minus side."""
    table: Dict[PenaltyKey, float] = {}
    for facet in mesh.facets:
        table[(facet.side_plus.cell, facet.side_plus.local_facet)] = float(plus)
        if facet.side_minus is not None:
            table[(facet.side_minus.cell, facet.side_minus.local_facet)] = float(minus)
    return table
