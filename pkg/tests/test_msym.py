import math

import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from src.errors import MethodError, ValidationError
from src.hdg import MethodFamily, MethodSpec, solve, two_sided_penalty
from src.msym import (
    IdentityKind,
    PairingMatrix,
    TestField,
    additivity_residual,
    boundary_pairing,
    conservativity_jump,
    continuum_identity_check,
    discrete_reciprocity_residual,
    inf_norm,
    jump_identity_residual,
    local_mscl_residual,
    sample_regions,
    strong_mscl_residual,
    tangent_variations,
    trace_identification_residual,
    variation_labels,
    weak_mscl_residual,
)
from src.system import SourceProbe, builtin_system, poisson

from .conftest import solve_random

X = TestField(
    value=lambda x: x[:, 0],
    gradient=lambda x: np.tile([1.0, 0.0], (x.shape[0], 1)),
    laplacian=lambda x: np.zeros(x.shape[0]),
)
Y = TestField(
    value=lambda x: x[:, 1],
    gradient=lambda x: np.tile([0.0, 1.0], (x.shape[0], 1)),
    laplacian=lambda x: np.zeros(x.shape[0]),
)
SADDLE = TestField(
    value=lambda x: x[:, 0] ** 2 - x[:, 1] ** 2,
    gradient=lambda x: np.stack([2.0 * x[:, 0], -2.0 * x[:, 1]], axis=1),
    laplacian=lambda x: np.zeros(x.shape[0]),
)
TWIST = TestField(
    value=lambda x: 2.0 * x[:, 0] * x[:, 1],
    gradient=lambda x: np.stack([2.0 * x[:, 1], 2.0 * x[:, 0]], axis=1),
    laplacian=lambda x: np.zeros(x.shape[0]),
)
CUBIC = TestField(
    value=lambda x: x[:, 0] ** 3,
    gradient=lambda x: np.stack([3.0 * x[:, 0] ** 2, np.zeros(x.shape[0])], axis=1),
    laplacian=lambda x: 6.0 * x[:, 0],
)
SHEARED = TestField(
    value=lambda x: x[:, 0] * x[:, 1],
    gradient=lambda x: np.stack([x[:, 1], x[:, 0]], axis=1),
    laplacian=lambda x: np.zeros(x.shape[0]),
    flux=lambda x: np.stack([x[:, 1] ** 2, x[:, 0]], axis=1),
    flux_divergence=lambda x: np.zeros(x.shape[0]),
)


@pytest.fixture
def rth_variations(rth_base):
    return tangent_variations(rth_base)


@pytest.fixture
def cgh_pair_variations(cgh_pair_base):
    return tangent_variations(cgh_pair_base)


def test_rth_is_multisymplectic(rth_variations):
    assert local_mscl_residual(rth_variations).max <= 1e-9
    entries = strong_mscl_residual(rth_variations, count=8, seed=1)
    assert max(entry.residual for entry in entries) <= 1e-9
    assert weak_mscl_residual(rth_variations) <= 1e-9


@pytest.mark.parametrize(
    "family, r",
    [
        (MethodFamily.BDM_H, 1),
        (MethodFamily.LDG_H_A, 1),
        (MethodFamily.LDG_H_C, 2),
        (MethodFamily.IP_H, 1),
        (MethodFamily.IP_H_LIKE, 1),
        (MethodFamily.NC_H, 1),
    ],
)
def test_strongly_multisymplectic_families(small_mesh, laplace, family, r):
    base = solve_random(small_mesh, MethodSpec(family, r), laplace, seed=6)
    assert conservativity_jump(base).max <= 1e-10
    variations = tangent_variations(base)
    assert local_mscl_residual(variations).max <= 1e-9
    assert max(entry.residual for entry in strong_mscl_residual(variations, count=5, seed=2)) <= 1e-9


SYSTEMS = ["poisson", "linear_elliptic", "anisotropic", "semilinear_sine", "coupled_pair"]


@pytest.mark.parametrize("system_name", SYSTEMS)
@pytest.mark.parametrize(
    "method",
    [
        MethodSpec(MethodFamily.RT_H, 0),
        MethodSpec(MethodFamily.LDG_H_A, 1, penalty=0.0),
        MethodSpec(MethodFamily.LDG_H_B, 2, penalty=10.0),
        MethodSpec(MethodFamily.CG_H, 2),
    ],
    ids=["rth-0", "ldgha-0", "ldghb-10", "cgh-2"],
)
def test_local_conservation_across_systems(small_mesh, system_name, method):
    system = builtin_system(system_name, {"m": 2})
    variations = tangent_variations(solve_random(small_mesh, method, system, seed=12))
    assert local_mscl_residual(variations).max <= 1e-9
    assert jump_identity_residual(variations) <= 1e-10


def test_two_sided_penalty_stays_multisymplectic(small_mesh):
    penalty = two_sided_penalty(small_mesh, 2.0, 0.5)
    base = solve_random(small_mesh, MethodSpec(MethodFamily.LDG_H_C, 1, penalty=penalty), builtin_system("coupled_pair"))
    variations = tangent_variations(base)
    assert local_mscl_residual(variations).max <= 1e-9
    assert max(entry.residual for entry in strong_mscl_residual(variations, count=5, seed=7)) <= 1e-9
    assert conservativity_jump(base).max <= 1e-10


def test_cgh_two_triangles_violate_strong_conservation(cgh_pair_variations):
    assert variation_labels(cgh_pair_variations.base) == ("u1", "u2", "u3", "u4")
    (whole,) = strong_mscl_residual(cgh_pair_variations, regions=[(0, 1)])
    assert whole.residual >= 0.1
    assert whole.residual == pytest.approx(0.5, abs=1e-12)
    assert whole.absolute == pytest.approx(1.0 / math.sqrt(3.0), abs=1e-12)
    assert local_mscl_residual(cgh_pair_variations).max <= 1e-12
    assert weak_mscl_residual(cgh_pair_variations) <= 1e-12


def test_cgh_two_triangles_are_not_conservative(two_equilateral, laplace):
    base = solve_random(two_equilateral, MethodSpec(MethodFamily.CG_H, 1), laplace, seed=0)
    assert conservativity_jump(base).max > 1e-3


def test_cgh_is_multisymplectic_in_one_dimension(interval_mesh):
    base = solve_random(interval_mesh, MethodSpec(MethodFamily.CG_H, 2), poisson(1))
    variations = tangent_variations(base)
    entries = strong_mscl_residual(variations, count=6, seed=4)
    assert max(entry.residual for entry in entries) <= 1e-10


def test_rth_is_conservative(rth_base):
    result = conservativity_jump(rth_base)
    assert set(result.per_facet) == set(rth_base.mesh.internal_facet_ids)
    assert result.max <= 1e-10


@pytest.mark.parametrize(
    "family, r",
    [
        (MethodFamily.RT_H, 1),
        (MethodFamily.LDG_H_B, 1),
        (MethodFamily.CG_H, 1),
        (MethodFamily.NC_H, 1),
    ],
)
def test_jump_identity(small_mesh, laplace, family, r):
    variations = tangent_variations(solve_random(small_mesh, MethodSpec(family, r), laplace, seed=3))
    assert jump_identity_residual(variations) <= 1e-10


def test_open_system_fails_locally(small_mesh):
    system = builtin_system("non_hamiltonian_control")
    variations = tangent_variations(solve_random(small_mesh, MethodSpec(MethodFamily.RT_H, 1), system))
    assert local_mscl_residual(variations).max > 1e-6


def test_additivity(rth_variations):
    mesh = rth_variations.base.mesh
    neighbor = mesh.neighbors(0)[0]
    assert additivity_residual(rth_variations, (0,), (neighbor,)) <= 1e-10
    with pytest.raises(ValidationError):
        additivity_residual(rth_variations, (0,), (0, neighbor))


def test_region_validation(rth_variations):
    with pytest.raises(ValidationError):
        boundary_pairing(rth_variations, ())
    with pytest.raises(ValidationError):
        boundary_pairing(rth_variations, (rth_variations.base.mesh.n_cells,))


@hypothesis_settings(max_examples=30, deadline=None)
@given(arrays(np.float64, (5, 5), elements=st.floats(-10.0, 10.0)))
def test_pairing_form_is_antisymmetric(matrix):
    pairing = PairingMatrix(region=(0,), matrix=matrix)
    for a in range(5):
        assert pairing.form(a, a) == 0.0
        for b in range(5):
            assert pairing.form(a, b) == -pairing.form(b, a)
    assert pairing.absolute == inf_norm(matrix - matrix.T)
    assert pairing.residual <= pairing.absolute


def test_sample_regions(perturbed_mesh):
    regions = sample_regions(perturbed_mesh, count=12, seed=5)
    n = perturbed_mesh.n_cells
    assert regions[:n] == [(cell,) for cell in range(n)]
    assert regions[n] == tuple(range(n))
    assert len(set(regions)) == len(regions)
    assert regions == sample_regions(perturbed_mesh, count=12, seed=5)
    for region in regions[n + 1 :]:
        reached = {region[0]}
        frontier = [region[0]]
        while frontier:
            cell = frontier.pop()
            for neighbor in perturbed_mesh.neighbors(cell):
                if neighbor in region and neighbor not in reached:
                    reached.add(neighbor)
                    frontier.append(neighbor)
        assert reached == set(region)


@pytest.mark.parametrize(
    "kind, v, v_prime",
    [
        (IdentityKind.GREEN_SECOND_IDENTITY, X, Y),
        (IdentityKind.GREEN_SECOND_IDENTITY, SADDLE, TWIST),
        (IdentityKind.GREEN_SECOND_IDENTITY, CUBIC, Y),
        (IdentityKind.RECIPROCITY_INTEGRAL, CUBIC, TWIST),
        (IdentityKind.RECIPROCITY_INTEGRAL, SHEARED, SADDLE),
    ],
)
def test_continuum_identities(kind, v, v_prime):
    assert continuum_identity_check(kind, v, v_prime) <= 1e-12
    skewed = ((0.1, -0.2), (1.3, 0.1), (0.4, 0.9))
    assert continuum_identity_check(kind.value, v, v_prime, cell_vertices=skewed) <= 1e-12


def test_custom_flux_needs_divergence():
    field = TestField(
        value=X.value,
        gradient=X.gradient,
        laplacian=X.laplacian,
        flux=lambda x: np.ones((x.shape[0], 2)),
    )
    with pytest.raises(ValidationError):
        field.g(np.zeros((1, 2)))


def test_source_free_discrete_reciprocity(rth_base):
    silent = SourceProbe.constant(np.zeros(2), np.zeros(1))
    result = discrete_reciprocity_residual(rth_base, silent, silent, seed=3)
    assert result.volume_term == 0.0
    assert result.residual <= 1e-10


def test_constant_source_reciprocity_for_rth(rth_base):
    probe = SourceProbe.constant(np.zeros(2), np.ones(1))
    probe_prime = SourceProbe.constant(np.zeros(2), np.array([-0.5]))
    result = discrete_reciprocity_residual(rth_base, probe, probe_prime, seed=3)
    assert result.volume_term != 0.0
    assert result.residual <= 1e-10


def test_tangents_match_finite_differences(small_mesh):
    system = builtin_system("semilinear_sine", {"m": 2})
    method = MethodSpec(MethodFamily.RT_H, 1)
    base = solve_random(small_mesh, method, system, seed=8)
    variations = tangent_variations(base)
    step = 1e-5
    for a in (0, len(variations) // 2):
        bump = np.zeros(base.boundary_values.size)
        bump[a] = step
        forward = solve(small_mesh, method, system, base.boundary_values + bump)
        backward = solve(small_mesh, method, system, base.boundary_values - bump)
        difference = (forward.vector - backward.vector) / (2.0 * step)
        np.testing.assert_allclose(variations.vectors[a], difference, atol=1e-5)


@pytest.mark.parametrize("family", [MethodFamily.CG_H, MethodFamily.NC_H])
def test_trace_identification(small_mesh, laplace, family):
    base = solve_random(small_mesh, MethodSpec(family, 1), laplace, seed=9)
    assert trace_identification_residual(base) <= 1e-10


def test_trace_identification_needs_unknown_flux(rth_base):
    with pytest.raises(MethodError):
        trace_identification_residual(rth_base)
