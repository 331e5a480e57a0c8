"""Shared fixtures: meshes, systems and solved bases."""

import math

import numpy as np
import pytest

from src.geometry import build_interval_mesh, build_rect_tri_mesh, build_two_equilateral_mesh
from src.hdg import MethodFamily, MethodSpec, random_boundary_data, solve
from src.hdg.spaces import build_trace_layout, local_space_table
from src.system import poisson

SQRT3_OVER_6 = math.sqrt(3.0) / 6.0


@pytest.fixture
def two_equilateral():
    return build_two_equilateral_mesh()


@pytest.fixture
def perturbed_mesh():
    """The 4x4 perturbed unit square used by the verification sweeps."""
    return build_rect_tri_mesh((0.0, 1.0), (0.0, 1.0), 4, 4, perturb=0.2, seed=7)


@pytest.fixture
def small_mesh():
    return build_rect_tri_mesh((0.0, 1.0), (0.0, 1.0), 2, 2, perturb=0.2, seed=3)


@pytest.fixture
def interval_mesh():
    return build_interval_mesh(0.0, 1.0, 4)


@pytest.fixture
def laplace():
    return poisson(2)


def solve_random(mesh, method, system, seed=0):
    """Solve with seeded uniform [-1, 1] boundary data."""
    layout = build_trace_layout(mesh, local_space_table(method, mesh.dim, system.n))
    return solve(mesh, method, system, random_boundary_data(layout, seed))


@pytest.fixture
def rth_base(small_mesh, laplace):
    return solve_random(small_mesh, MethodSpec(MethodFamily.RT_H, 1), laplace)


@pytest.fixture
def cgh_pair_base(two_equilateral, laplace):
    return solve(two_equilateral, MethodSpec(MethodFamily.CG_H, 1), laplace, np.zeros(4))
