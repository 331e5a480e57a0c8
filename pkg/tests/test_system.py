import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from src.errors import ClosednessError, MethodError, SystemDefinitionError
from src.system import (
    BUILTIN_NAMES,
    HamiltonianDef,
    SourceProbe,
    anisotropic,
    builtin_system,
    check_jacobians,
    closedness_residual,
    default_ip_coefficient,
    from_hamiltonian,
    parse_system_spec,
    reconstruct_hamiltonian,
    sample_states,
)

HAMILTONIAN_BUILTINS = [name for name in BUILTIN_NAMES if name != "non_hamiltonian_control"]


@pytest.mark.parametrize("name", HAMILTONIAN_BUILTINS)
@pytest.mark.parametrize("m", [1, 2])
def test_builtins_are_closed(name, m):
    system = builtin_system(name, {"m": m})
    assert closedness_residual(system, sample_states(system.m, system.n, seed=3)) <= 1e-12


def test_control_is_not_closed():
    system = builtin_system("non_hamiltonian_control")
    assert closedness_residual(system, sample_states(system.m, system.n, seed=3)) == 1.0


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_builtin_jacobians_match_differences(name):
    assert check_jacobians(builtin_system(name), seed=5) <= 1e-6


@pytest.mark.parametrize("name", ["semilinear_sine", "coupled_pair"])
def test_nonlinear_and_coupled_checks_cover_wide_states(name):
    system = builtin_system(name)
    x, u, sigma = sample_states(system.m, system.n, seed=11)
    assert u.shape[0] == 50
    assert np.abs(u).max() > 5.0 and np.abs(u).max() <= 10.0
    assert np.abs(sigma).max() <= 10.0
    assert closedness_residual(system, (x, u, sigma)) <= 1e-12
    assert check_jacobians(system, seed=11) <= 1e-6
    assert check_jacobians(system, n_states=50, seed=11, bound=10.0) == check_jacobians(system, seed=11)


@pytest.mark.parametrize("name", ["poisson", "anisotropic", "semilinear_sine"])
def test_hamiltonian_reconstruction(name):
    system = builtin_system(name)
    x, u, sigma = sample_states(system.m, system.n, count=20, seed=9)
    for k in range(20):
        xk, uk, sk = x[k : k + 1], u[k : k + 1], sigma[k : k + 1]
        exact = system.hamiltonian(xk, uk, sk)[0] - system.hamiltonian(xk, 0 * uk, 0 * sk)[0]
        rebuilt = reconstruct_hamiltonian(system, xk, uk, sk)
        assert abs(rebuilt - exact) <= 1e-8 * (1.0 + abs(system.hamiltonian(xk, uk, sk)[0]))


def test_reconstruction_refuses_open_system():
    system = builtin_system("non_hamiltonian_control")
    with pytest.raises(ClosednessError):
        reconstruct_hamiltonian(system, np.zeros(2), np.ones(2), np.ones(4))


@hypothesis_settings(max_examples=20, deadline=None)
@given(arrays(np.float64, (3, 3), elements=st.floats(-2.0, 2.0)))
def test_random_quadratic_hamiltonians_are_closed(raw):
    hessian = raw + raw.T
    h = HamiltonianDef(
        H=lambda x, u, s: 0.5 * np.einsum("qi,ij,qj->q", np.hstack([u, s]), hessian, np.hstack([u, s])),
        dH_du=lambda x, u, s: (np.hstack([u, s]) @ hessian)[:, :1],
        dH_dsigma=lambda x, u, s: (np.hstack([u, s]) @ hessian)[:, 1:],
        hessian=lambda x, u, s: np.broadcast_to(hessian, (x.shape[0], 3, 3)).copy(),
    )
    system = from_hamiltonian(h, m=2, n=1, label="quadratic", seed=1)
    assert closedness_residual(system, sample_states(2, 1, seed=2)) <= 1e-12


def test_inconsistent_hamiltonian_gradients_rejected():
    h = HamiltonianDef(
        H=lambda x, u, s: 0.5 * np.sum(s * s, axis=1),
        dH_du=lambda x, u, s: np.ones_like(u),
        dH_dsigma=lambda x, u, s: s,
    )
    with pytest.raises(SystemDefinitionError):
        from_hamiltonian(h, m=2, n=1)


def test_hamiltonian_without_hessian_uses_differences():
    h = HamiltonianDef(
        H=lambda x, u, s: 0.5 * np.sum(s * s, axis=1) - np.cos(u[:, 0]),
        dH_du=lambda x, u, s: np.sin(u),
        dH_dsigma=lambda x, u, s: s,
    )
    system = from_hamiltonian(h, m=2, n=1, label="pendulum")
    assert system.label == "pendulum[fd]"
    assert closedness_residual(system, sample_states(2, 1, seed=4)) <= 1e-6


def test_parse_system_spec():
    system = parse_system_spec("anisotropic:a=2;1;1;3", m=2)
    np.testing.assert_array_equal(system.flux_coefficient, [[2.0, 1.0], [1.0, 3.0]])
    assert parse_system_spec("semilinear_sine:kappa=2").label == "semilinear_sine"
    assert parse_system_spec("poisson", m=1).m == 1


@pytest.mark.parametrize("spec", ["helmholtz", "poisson:f", "poisson:g=1", "anisotropic:a=1;2;3"])
def test_parse_system_spec_errors(spec):
    with pytest.raises(SystemDefinitionError):
        parse_system_spec(spec)


def test_anisotropic_requires_spd():
    with pytest.raises(SystemDefinitionError):
        anisotropic(2, [[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(SystemDefinitionError):
        anisotropic(2, [[1.0, 0.5], [0.0, 1.0]])


def test_default_ip_coefficient():
    np.testing.assert_allclose(
        default_ip_coefficient(anisotropic(2, [[2.0, 0.0], [0.0, 4.0]])), [[0.5, 0.0], [0.0, 0.25]]
    )
    quadratic = from_hamiltonian(
        HamiltonianDef(
            H=lambda x, u, s: 0.5 * np.sum(s * s, axis=1),
            dH_du=lambda x, u, s: np.zeros_like(u),
            dH_dsigma=lambda x, u, s: s,
        ),
        m=2,
        n=1,
    )
    with pytest.raises(MethodError):
        default_ip_coefficient(quadratic)


def test_constant_source_probe_broadcasts():
    probe = SourceProbe.constant(np.zeros(2), np.array([1.5]))
    x = np.zeros((4, 2))
    assert probe.g(x, None, None).shape == (4, 1)
    assert probe.psi(x, None, None).shape == (4, 2)
