from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings
from hypothesis import strategies as st

from src.errors import BasisError, QuadratureError
from src.polyspace import (
    BasisFamily,
    BasisKind,
    eval_rt_basis,
    eval_scalar_basis,
    lattice_nodes,
    quadrature_rule,
    reference_measure,
    rt_basis,
    scalar_basis,
    space_dim,
    vector_basis,
)


def triangle_monomial_integral(a: int, b: int) -> float:
    return factorial(a) * factorial(b) / factorial(a + b + 2)


@hypothesis_settings(max_examples=60, deadline=None)
@given(degree=st.integers(0, 20), data=st.data())
def test_triangle_rule_is_exact(degree, data):
    a = data.draw(st.integers(0, degree))
    b = data.draw(st.integers(0, degree - a))
    rule = quadrature_rule(2, degree)
    value = rule.weights @ (rule.points[:, 0] ** a * rule.points[:, 1] ** b)
    assert value == pytest.approx(triangle_monomial_integral(a, b), rel=1e-12, abs=1e-15)


@hypothesis_settings(max_examples=40, deadline=None)
@given(degree=st.integers(0, 24), data=st.data())
def test_interval_rule_is_exact(degree, data):
    k = data.draw(st.integers(0, degree))
    rule = quadrature_rule(1, degree)
    assert rule.weights @ rule.points[:, 0] ** k == pytest.approx(1.0 / (k + 1), rel=1e-13)


@pytest.mark.parametrize("sim_dim", [0, 1, 2])
def test_weights_sum_to_measure(sim_dim):
    rule = quadrature_rule(sim_dim, 7)
    assert rule.weights.sum() == pytest.approx(reference_measure(sim_dim), abs=1e-15)
    assert np.all(rule.weights > 0.0)


def test_quadrature_degree_out_of_range():
    with pytest.raises(QuadratureError):
        quadrature_rule(2, 99)
    with pytest.raises(BasisError):
        quadrature_rule(3, 2)


@pytest.mark.parametrize(
    "kind, r, d, expected",
    [
        (BasisKind.P_SCALAR, 2, 2, 6),
        (BasisKind.P_VECTOR, 1, 2, 6),
        (BasisKind.RT, 0, 2, 3),
        (BasisKind.RT, 1, 2, 8),
        (BasisKind.RT, 2, 1, 4),
        (BasisKind.P_SCALAR, 3, 1, 4),
    ],
)
def test_space_dimensions(kind, r, d, expected):
    assert space_dim(kind, r, d) == expected


def test_space_dim_rejects_unknown_kind():
    with pytest.raises(BasisError):
        space_dim("Nedelec", 1, 2)


@pytest.mark.parametrize("r, d", [(1, 2), (2, 2), (3, 2), (2, 1)])
def test_modal_basis_is_orthonormal(r, d):
    rule = quadrature_rule(d, 2 * r)
    values = eval_scalar_basis(r, d, rule.points).values
    gram = values.T @ (rule.weights[:, None] * values)
    np.testing.assert_allclose(gram, np.eye(gram.shape[0]), atol=1e-12)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_nodal_basis_is_kronecker_at_lattice(r):
    nodes = lattice_nodes(r, 2)
    values = scalar_basis(r, 2, BasisFamily.NODAL).tabulate(nodes).values
    np.testing.assert_allclose(values, np.eye(nodes.shape[0]), atol=1e-12)


def test_lattice_vertices_first_and_boundary_indices():
    nodes = lattice_nodes(2, 2)
    np.testing.assert_array_equal(nodes[:3], [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    assert list(scalar_basis(1, 2, BasisFamily.NODAL).boundary_indices) == [0, 1, 2]
    assert scalar_basis(3, 2, BasisFamily.NODAL).boundary_indices.size == 9


def test_modal_basis_has_no_boundary_indices():
    with pytest.raises(BasisError):
        scalar_basis(1, 2).boundary_indices


def test_degree_cap():
    with pytest.raises(BasisError):
        scalar_basis(9, 2)
    assert scalar_basis(5, 1, allow_high_degree=True).size == 6


@pytest.mark.parametrize("r", [0, 1, 2])
def test_rt_divergence_theorem(r):
    """int div v over the reference triangle equals the boundary flux of v."""
    rule = quadrature_rule(2, 2 * r + 2)
    table, traces = eval_rt_basis(r, 2, rule.points)
    volume = rule.weights @ table.divergence
    facet_rule = quadrature_rule(1, 2 * r + 4)
    lengths = [np.sqrt(2.0), 1.0, 1.0]
    boundary = sum(length * (facet_rule.weights @ normal_trace) for length, (_, normal_trace) in zip(lengths, traces))
    np.testing.assert_allclose(volume, boundary, atol=1e-12)


@pytest.mark.parametrize("r", [0, 1, 2])
def test_rt_normal_traces_are_degree_r(r):
    """Normal traces of RT_r lie in P_r(e): fitting P_r in t reproduces them."""
    _, traces = eval_rt_basis(r, 2, np.array([[0.2, 0.2]]))
    for t, normal_trace in traces:
        fit = np.polynomial.polynomial.polyfit(t, normal_trace, r)
        reproduced = np.polynomial.polynomial.polyval(t, fit).T
        np.testing.assert_allclose(reproduced, normal_trace, atol=1e-10)


def test_vector_basis_component_major():
    basis = vector_basis(1, 2)
    table = basis.tabulate_vector(np.array([[0.3, 0.3]]))
    assert table.values.shape == (1, 6, 2)
    np.testing.assert_allclose(table.values[0, :3, 1], 0.0)
    np.testing.assert_allclose(table.values[0, 3:, 0], 0.0)
    assert rt_basis(1, 2).size == 8


def test_points_outside_reference_rejected():
    with pytest.raises(BasisError):
        eval_scalar_basis(1, 2, np.array([[0.8, 0.8]]))
