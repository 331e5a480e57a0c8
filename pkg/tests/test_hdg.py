import numpy as np
import pytest

from src.config import NewtonConfig
from src.errors import ConvergenceError, MethodError, SingularBlockError, ValidationError
from src.hdg import (
    FluxMode,
    HdgProblem,
    MethodFamily,
    MethodSpec,
    boundary_data_from_function,
    build_trace_layout,
    condense_schur,
    local_space_table,
    parse_family,
    random_boundary_data,
    resolve_boundary_data,
    solve,
    two_sided_penalty,
)
from src.msym import tangent_variations
from src.system import anisotropic, builtin_system, poisson

from .conftest import solve_random


def linear_field(x):
    return (1.0 + 2.0 * x[:, 0] - x[:, 1])[:, None]


def p1_stiffness(mesh):
    """Assembled P1 stiffness: sum over cells of area * G G^T."""
    stiffness = np.zeros((mesh.n_vertices, mesh.n_vertices))
    for cell, vertices in enumerate(mesh.cells):
        points = mesh.vertices[vertices]
        edges = (points[1:] - points[0]).T
        reference = np.array([[-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]])
        gradients = np.linalg.solve(edges.T, reference).T
        stiffness[np.ix_(vertices, vertices)] += mesh.volume(cell) * gradients @ gradients.T
    return stiffness


@pytest.mark.parametrize(
    "name, expected",
    [
        ("rth", MethodFamily.RT_H),
        ("ldgh-b", MethodFamily.LDG_H_B),
        ("LDG_H_C", MethodFamily.LDG_H_C),
        ("iph-like", MethodFamily.IP_H_LIKE),
        ("cg-h", MethodFamily.CG_H),
    ],
)
def test_parse_family(name, expected):
    assert parse_family(name) == expected


def test_parse_family_unknown():
    with pytest.raises(MethodError):
        parse_family("hdg-x")


def test_degree_rules():
    assert MethodSpec("rth", 0).degree == 0
    assert MethodSpec(MethodFamily.LDG_H_B, 0).label == "LDG_H_B(r=0)"
    with pytest.raises(MethodError):
        MethodSpec(MethodFamily.CG_H, 0)
    with pytest.raises(MethodError):
        MethodSpec(MethodFamily.IP_H, 1.5)


def test_coefficient_validation():
    with pytest.raises(MethodError):
        MethodSpec(MethodFamily.IP_H, 1, coeff_a=lambda x: np.eye(2))
    with pytest.raises(MethodError):
        MethodSpec(MethodFamily.IP_H, 1, coeff_a=np.array([[1.0, 2.0], [2.0, 1.0]]))
    spec = MethodSpec(MethodFamily.IP_H, 1, coeff_a={0: np.eye(2)})
    with pytest.raises(MethodError):
        spec.coefficient_for(1)


def test_penalty_forms(two_equilateral):
    table = two_sided_penalty(two_equilateral, 2.0, 0.5)
    assert len(table) == 6
    spec = MethodSpec(MethodFamily.LDG_H_A, 1, penalty=table)
    (facet_id,) = two_equilateral.internal_facet_ids
    plus, minus = two_equilateral.facets[facet_id].side_plus, two_equilateral.facets[facet_id].side_minus
    assert spec.penalty_for(plus.cell, plus.local_facet) == 2.0
    assert spec.penalty_for(minus.cell, minus.local_facet) == 0.5
    assert MethodSpec(MethodFamily.LDG_H_A, 1, penalty=lambda c, j: c + j).penalty_for(1, 2) == 3.0
    with pytest.raises(MethodError):
        MethodSpec(MethodFamily.LDG_H_A, 1, penalty=float("inf")).penalty_for(0, 0)


@pytest.mark.parametrize(
    "family, r, counts",
    [
        (MethodFamily.RT_H, 1, (3, 8, 2)),
        (MethodFamily.BDM_H, 1, (1, 6, 2)),
        (MethodFamily.LDG_H_C, 2, (6, 6, 3)),
        (MethodFamily.CG_H, 1, (3, 2, 2)),
        (MethodFamily.NC_H, 2, (6, 6, 2)),
    ],
)
def test_local_space_counts(family, r, counts):
    spaces = local_space_table(MethodSpec(family, r), 2, 1)
    assert (spaces.dim_v, spaces.dim_sigma, spaces.dim_trace) == counts


def test_flux_modes_and_hat_counts():
    nch = local_space_table(MethodSpec(MethodFamily.NC_H, 2), 2, 1)
    assert nch.flux_mode == FluxMode.UNKNOWN
    assert (nch.dim_v, nch.dim_sigma, nch.dim_hat) == (6, 6, 6)
    cgh = local_space_table(MethodSpec(MethodFamily.CG_H, 1), 2, 1)
    assert cgh.dim_hat == 3
    assert local_space_table(MethodSpec(MethodFamily.RT_H, 1), 2, 1).flux_mode == FluxMode.ELIMINATED


def test_cg_trace_layout_is_shared(perturbed_mesh):
    spaces = local_space_table(MethodSpec(MethodFamily.CG_H, 1), 2, 1)
    layout = build_trace_layout(perturbed_mesh, spaces)
    assert layout.continuous
    assert layout.n_dofs == perturbed_mesh.n_vertices
    assert layout.boundary_dofs.size == 16
    assert layout.interior_dofs.size == 9


def test_system_dimension_mismatch(small_mesh):
    with pytest.raises(ValidationError):
        HdgProblem(small_mesh, MethodSpec(MethodFamily.RT_H, 1), poisson(1))


def test_ip_coefficient_shape_checked(small_mesh, laplace):
    with pytest.raises(MethodError):
        HdgProblem(small_mesh, MethodSpec(MethodFamily.IP_H, 1, coeff_a=np.eye(3)), laplace)


@pytest.mark.parametrize(
    "family, r",
    [
        (MethodFamily.RT_H, 1),
        (MethodFamily.BDM_H, 2),
        (MethodFamily.LDG_H_A, 2),
        (MethodFamily.LDG_H_B, 1),
        (MethodFamily.LDG_H_C, 1),
        (MethodFamily.CG_H, 1),
        (MethodFamily.NC_H, 1),
        (MethodFamily.IP_H, 1),
        (MethodFamily.IP_H_LIKE, 1),
    ],
)
def test_linear_solutions_are_reproduced(small_mesh, laplace, family, r):
    solution = solve(small_mesh, MethodSpec(family, r), laplace, linear_field)
    layout = solution.problem.layout
    np.testing.assert_allclose(solution.trace, linear_field(layout.node_points).ravel(), atol=1e-10)
    for cell in range(small_mesh.n_cells):
        centroid = small_mesh.vertices[small_mesh.cells[cell]].mean(axis=0, keepdims=True)
        u, sigma = solution.evaluate(cell, centroid)
        np.testing.assert_allclose(u, linear_field(centroid), atol=1e-10)
        np.testing.assert_allclose(sigma[0, 0], [2.0, -1.0], atol=1e-9)


def test_cg_condensed_operator_is_p1_stiffness(perturbed_mesh, laplace):
    base = solve_random(perturbed_mesh, MethodSpec(MethodFamily.CG_H, 1), laplace)
    operator = condense_schur(base)
    stiffness = p1_stiffness(perturbed_mesh)
    interior = operator.interior_dofs
    np.testing.assert_allclose(operator.full[interior].toarray(), stiffness[interior], atol=1e-12)
    np.testing.assert_allclose(operator.interior_block, stiffness[np.ix_(interior, interior)], atol=1e-12)


@pytest.mark.parametrize(
    "family, r",
    [
        (MethodFamily.RT_H, 1),
        (MethodFamily.LDG_H_B, 1),
        (MethodFamily.CG_H, 2),
        (MethodFamily.IP_H, 1),
    ],
)
def test_condensed_operator_symmetric_for_linear_systems(perturbed_mesh, family, r):
    system = anisotropic(2, [[2.0, 0.5], [0.5, 1.0]])
    base = solve_random(perturbed_mesh, MethodSpec(family, r), system, seed=4)
    assert condense_schur(base).asymmetry() <= 1e-12


def test_even_degree_nch_block_is_singular(small_mesh, laplace):
    with pytest.raises(SingularBlockError) as info:
        solve(small_mesh, MethodSpec(MethodFamily.NC_H, 2), laplace)
    assert info.value.error_code == "SINGULAR_BLOCK"
    assert info.value.context["cell_id"] == 0


@pytest.mark.parametrize("seed", [None, 6])
def test_singular_block_detected_with_or_without_newton_steps(small_mesh, laplace, seed):
    method = MethodSpec(MethodFamily.NC_H, 2)
    with pytest.raises(SingularBlockError):
        if seed is None:
            solve(small_mesh, method, laplace, None)
        else:
            solve_random(small_mesh, method, laplace, seed=seed)


def test_zero_data_solution_is_accepted_without_steps(small_mesh, laplace):
    base = solve(small_mesh, MethodSpec(MethodFamily.RT_H, 1), laplace)
    assert base.iterations == 0
    assert base.residual_norm == 0.0


def test_newton_on_semilinear_system(small_mesh):
    system = builtin_system("semilinear_sine", {"m": 2})
    base = solve_random(small_mesh, MethodSpec(MethodFamily.RT_H, 1), system, seed=2)
    assert base.iterations >= 1
    assert base.residual_norm <= base.tolerance * max(1.0, base.history[0])
    assert base.history[-1] < base.history[0]
    assert tangent_variations(base).linear_residual() <= 1e-10


def test_newton_gives_up(small_mesh):
    system = builtin_system("semilinear_sine", {"m": 2})
    layout = build_trace_layout(small_mesh, local_space_table(MethodSpec(MethodFamily.RT_H, 1), 2, 1))
    with pytest.raises(ConvergenceError):
        solve(
            small_mesh,
            MethodSpec(MethodFamily.RT_H, 1),
            system,
            random_boundary_data(layout, 2),
            newton=NewtonConfig(tol=1e-12, max_iter=0),
        )


def test_linear_system_converges_in_one_step(small_mesh, laplace):
    base = solve_random(small_mesh, MethodSpec(MethodFamily.LDG_H_A, 1), laplace)
    assert base.iterations == 1


def test_boundary_data_forms(small_mesh):
    spaces = local_space_table(MethodSpec(MethodFamily.RT_H, 1), 2, 1)
    layout = build_trace_layout(small_mesh, spaces)
    count = layout.boundary_dofs.size
    np.testing.assert_array_equal(random_boundary_data(layout, 5), random_boundary_data(layout, 5))
    assert np.all(np.abs(random_boundary_data(layout, 5)) <= 1.0)
    np.testing.assert_array_equal(resolve_boundary_data(layout, None), np.zeros(count))
    mapping = {int(d): 0.5 for d in layout.boundary_dofs}
    np.testing.assert_array_equal(resolve_boundary_data(layout, mapping), np.full(count, 0.5))
    np.testing.assert_allclose(
        resolve_boundary_data(layout, linear_field),
        boundary_data_from_function(layout, linear_field),
    )

    with pytest.raises(ValidationError):
        resolve_boundary_data(layout, np.zeros(count + 1))
    mapping.pop(int(layout.boundary_dofs[0]))
    with pytest.raises(ValidationError):
        resolve_boundary_data(layout, mapping)


def test_interval_solve(interval_mesh):
    system = poisson(1)
    solution = solve(interval_mesh, MethodSpec(MethodFamily.RT_H, 1), system, lambda x: 3.0 * x[:, :1] - 1.0)
    assert solution.problem.layout.boundary_dofs.size == 2
    u, sigma = solution.evaluate(1, np.array([[0.3]]))
    np.testing.assert_allclose(u, [[-0.1]], atol=1e-10)
    np.testing.assert_allclose(sigma[0, 0], [3.0], atol=1e-10)
