"""Every family, degree and builtin system on the 4x4 perturbed mesh."""

import pytest

from src.errors import SingularBlockError, SingularJacobianError
from src.hdg import MethodFamily, MethodSpec, two_sided_penalty
from src.msym import (
    conservativity_jump,
    jump_identity_residual,
    local_mscl_residual,
    strong_mscl_residual,
    tangent_variations,
)
from src.system import builtin_system

from .conftest import solve_random

pytestmark = pytest.mark.sweep

DATA_SEED = 11
SYSTEMS = ["poisson", "linear_elliptic", "anisotropic", "semilinear_sine", "coupled_pair"]
CONFIGURATIONS = [(MethodFamily.RT_H, 0)] + [(family, r) for family in MethodFamily for r in (1, 2, 3)]


def config_id(config):
    family, r = config
    return f"{family.value.lower()}-r{r}"


def assert_multisymplectic(base, strongly=True):
    variations = tangent_variations(base)
    assert local_mscl_residual(variations).max <= 1e-9
    assert jump_identity_residual(variations) <= 1e-10
    if strongly:
        entries = strong_mscl_residual(variations, seed=DATA_SEED)
        assert max(entry.residual for entry in entries) <= 1e-9
        assert conservativity_jump(base).max <= 1e-10


@pytest.mark.parametrize("system_name", SYSTEMS)
@pytest.mark.parametrize("config", CONFIGURATIONS, ids=config_id)
def test_family_sweep(perturbed_mesh, config, system_name):
    family, r = config
    system = builtin_system(system_name, {"m": 2})
    method = MethodSpec(family, r)
    if family == MethodFamily.NC_H and r % 2 == 0:
        with pytest.raises(SingularBlockError):
            solve_random(perturbed_mesh, method, system, seed=DATA_SEED)
        return
    base = solve_random(perturbed_mesh, method, system, seed=DATA_SEED)
    assert_multisymplectic(base, strongly=family != MethodFamily.CG_H)


@pytest.mark.parametrize("system_name", ["semilinear_sine", "coupled_pair"])
@pytest.mark.parametrize(
    "family, penalty",
    [
        (MethodFamily.LDG_H_A, 0.0),
        (MethodFamily.LDG_H_A, 10.0),
        (MethodFamily.LDG_H_B, 10.0),
        (MethodFamily.LDG_H_C, 10.0),
        (MethodFamily.LDG_H_A, (1.0, 10.0)),
        (MethodFamily.LDG_H_B, (1.0, 10.0)),
        (MethodFamily.LDG_H_C, (1.0, 10.0)),
    ],
)
def test_ldg_penalty_sweep(perturbed_mesh, family, penalty, system_name):
    if isinstance(penalty, tuple):
        penalty = two_sided_penalty(perturbed_mesh, *penalty)
    system = builtin_system(system_name, {"m": 2})
    base = solve_random(perturbed_mesh, MethodSpec(family, 1, penalty=penalty), system, seed=DATA_SEED)
    assert_multisymplectic(base)


@pytest.mark.parametrize(
    "family, system_name, error",
    [
        (MethodFamily.LDG_H_B, "poisson", SingularBlockError),
        (MethodFamily.LDG_H_C, "poisson", SingularBlockError),
        (MethodFamily.LDG_H_C, "semilinear_sine", SingularJacobianError),
        (MethodFamily.LDG_H_C, "coupled_pair", SingularJacobianError),
    ],
)
def test_unpenalized_ldg_is_not_solvable(perturbed_mesh, family, system_name, error):
    system = builtin_system(system_name, {"m": 2})
    with pytest.raises(error):
        solve_random(perturbed_mesh, MethodSpec(family, 1, penalty=0.0), system, seed=DATA_SEED)
