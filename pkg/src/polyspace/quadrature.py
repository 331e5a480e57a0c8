"""Quadrature rules on reference simplices."""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from ..config import settings
from ..errors import BasisError, QuadratureError


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Points (reference Cartesian coordinates) and positive weights on a reference simplex.

    Reference simplices: the point (sim_dim 0), [0, 1] (sim_dim 1) and the triangle with
    vertices (0,0), (1,0), (0,1) (sim_dim 2). Weights sum to the reference measure.
    """
    sim_dim: int
    degree: int
    points: np.ndarray
    weights: np.ndarray

    @property
    def barycentric(self) -> np.ndarray:
        first = 1.0 - self.points.sum(axis=1, keepdims=True)
        return np.hstack([first, self.points])

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])


def _gauss_legendre_unit(n: int) -> tuple:
    x, w = roots_legendre(n)
    return (x + 1.0) / 2.0, w / 2.0


@lru_cache(maxsize=None)
def quadrature_rule(sim_dim: int, target_degree: int) -> QuadratureRule:
    """Rule exact for polynomials of total degree <= target_degree."""
    max_degree = settings.max_quadrature_degree
    if target_degree < 0 or target_degree > max_degree:
        raise QuadratureError(
            f"quadrature degree {target_degree} outside supported range [0, {max_degree}]",
            degree=target_degree,
        )

    if sim_dim == 0:
        points = np.zeros((1, 0))
        weights = np.ones(1)
    elif sim_dim == 1:
        n = max(1, math.ceil((target_degree + 1) / 2))
        x, w = _gauss_legendre_unit(n)
        points = x[:, None]
        weights = w
    elif sim_dim == 2:
        # Collapsed coordinates: x = s, y = t (1 - s); the (1 - s) Jacobian is
        # absorbed by a Gauss-Jacobi(1, 0) rule in s.
        n = max(1, math.ceil((target_degree + 1) / 2))
        a, wa = roots_jacobi(n, 1.0, 0.0)
        s = (a + 1.0) / 2.0
        ws = wa / 4.0
        t, wt = _gauss_legendre_unit(n)
        s_grid, t_grid = np.meshgrid(s, t, indexing="ij")
        points = np.column_stack([s_grid.ravel(), (t_grid * (1.0 - s_grid)).ravel()])
        weights = np.outer(ws, wt).ravel()
    else:
        raise BasisError(f"unsupported simplex dimension {sim_dim}", kind="quadrature")

    points.flags.writeable = False
    weights.flags.writeable = False
    return QuadratureRule(sim_dim=sim_dim, degree=target_degree, points=points, weights=weights)


def reference_measure(sim_dim: int) -> float:
    return 1.0 / math.factorial(sim_dim)
