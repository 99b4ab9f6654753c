import math

import numpy as np
import pytest
from scipy.linalg import expm

from ultrawalks.dynamics import (
    WalkKind,
    amplitude_oscillatory,
    amplitude_matrix,
    character_sphere_sum,
    classical_transition,
    classical_transition_via_heat,
    evolve_distribution,
    evolve_state,
    heat_kernel_ball_mass,
    heat_kernel_value,
    oscillatory_transition,
    quantum_transition,
    snapshot_violations,
    trajectories,
)
from ultrawalks.errors import DomainError
from ultrawalks.generator import build_generator
from ultrawalks.kernel import bessel_profile, tabulated_profile
from ultrawalks.padic import GroupSpec, norm_of_difference
from ultrawalks.spectral import eigendecompose

Q = 0.375


def test_two_state_closed_forms(two_state):
    t = 0.7
    p = classical_transition(two_state, t).matrix
    assert p[0, 0] == pytest.approx((1 + math.exp(-2 * Q * t)) / 2, abs=1e-14)
    assert p[0, 1] == pytest.approx((1 - math.exp(-2 * Q * t)) / 2, abs=1e-14)
    pi = quantum_transition(two_state, t).matrix
    assert pi[0, 1] == pytest.approx(math.sin(Q * t) ** 2, abs=1e-14)
    assert pi[0, 0] == pytest.approx(math.cos(Q * t) ** 2, abs=1e-14)


def test_two_state_quantum_recurrence(two_state):
    for k in (1, 2, 5):
        pi = quantum_transition(two_state, k * math.pi / Q).matrix
        np.testing.assert_allclose(pi, np.eye(2), atol=1e-12)


def test_zero_time_is_identity(base_walk):
    np.testing.assert_allclose(classical_transition(base_walk, 0.0).matrix, np.eye(32), atol=1e-12)
    np.testing.assert_allclose(quantum_transition(base_walk, 0.0).matrix, np.eye(32), atol=1e-12)


def test_propagators_match_matrix_exponential():
    s = eigendecompose(build_generator(bessel_profile(GroupSpec(3, 2), 0.7)))
    j = s.generator.entries
    t = 2.5
    np.testing.assert_allclose(classical_transition(s, t).matrix, expm(t * j), atol=1e-10)
    np.testing.assert_allclose(amplitude_matrix(s, t), expm(1j * t * j), atol=1e-10)
    np.testing.assert_allclose(quantum_transition(s, t).matrix, np.abs(expm(1j * t * j)) ** 2, atol=1e-10)


@pytest.mark.parametrize("t", [1.0, 200.0, 4000.0])
def test_snapshots_are_stochastic(base_walk, t):
    p = classical_transition(base_walk, t)
    pi = quantum_transition(base_walk, t)
    assert snapshot_violations(p) == []
    assert snapshot_violations(pi) == []
    u = amplitude_matrix(base_walk, t)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(32), atol=1e-10)


def test_classical_walk_converges_to_uniform(base_walk):
    late = classical_transition(base_walk, 10000.0).matrix
    np.testing.assert_allclose(late, 2**-5, atol=1e-10)


def test_semigroup_property(base_walk):
    a = classical_transition(base_walk, 0.5).matrix
    b = classical_transition(base_walk, 1.5).matrix
    np.testing.assert_allclose(a @ b, classical_transition(base_walk, 2.0).matrix, atol=1e-12)


def test_negative_time_rejected(base_walk):
    with pytest.raises(DomainError):
        classical_transition(base_walk, -1.0)
    with pytest.raises(DomainError):
        quantum_transition(base_walk, -1.0)


def test_character_sum_matches_brute_force():
    spec = GroupSpec(3, 2)
    n = spec.size
    for x in range(n):
        valuation = norm_of_difference(spec, x, 0).v
        for j in range(spec.l + 1):
            brute = sum(
                math.cos(2 * math.pi * x * xi / n)
                for xi in range(n)
                if spec.l - norm_of_difference(spec, xi, 0).v == j
            )
            assert character_sphere_sum(spec, valuation, j) == pytest.approx(brute, abs=1e-9)


@pytest.mark.parametrize("alpha,t", [(1.2, 1.0), (1.2, 200.0), (1.0, 3.0), (4.5, 0.25)])
def test_heat_kernel_path_matches_spectral(base_spec, alpha, t):
    profile = bessel_profile(base_spec, alpha)
    s = eigendecompose(build_generator(profile))
    np.testing.assert_allclose(
        classical_transition_via_heat(profile, t).matrix, classical_transition(s, t).matrix, atol=1e-10
    )


@pytest.mark.parametrize("alpha,t", [(1.2, 1.0), (1.2, 500.0), (1.0, 7.0), (0.5, 0.25)])
def test_oscillatory_path_matches_spectral(base_spec, alpha, t):
    profile = bessel_profile(base_spec, alpha)
    s = eigendecompose(build_generator(profile))
    np.testing.assert_allclose(
        oscillatory_transition(profile, t).matrix, quantum_transition(s, t).matrix, atol=1e-10
    )


def test_heat_kernel_at_time_zero_vanishes_off_origin(base_spec):
    profile = bessel_profile(base_spec, 1.2)
    for m in range(base_spec.l):
        assert heat_kernel_value(profile, m, 0.0).value == pytest.approx(0.0, abs=1e-12)


def test_ball_masses_telescope_into_sphere_masses(base_spec):
    profile = bessel_profile(base_spec, 1.2)
    p, t = base_spec.p, 3.0
    assert heat_kernel_ball_mass(profile, 0, t) == 1.0
    for n in range(base_spec.l):
        sphere = p**-n * (1 - 1 / p) * heat_kernel_value(profile, n, t).value
        difference = heat_kernel_ball_mass(profile, n, t) - heat_kernel_ball_mass(profile, n + 1, t)
        assert difference == pytest.approx(sphere, abs=1e-12)


def test_tabulated_heat_kernel_stops_at_level_l():
    profile = tabulated_profile(GroupSpec(2, 1), [1.0], 0.5)
    heat_kernel_value(profile, 0, 1.0)
    with pytest.raises(DomainError):
        heat_kernel_value(profile, 1, 1.0)


def test_trajectories_follow_snapshots(base_walk):
    states = [12, 13, 14, 16, 20, 28]
    times = [0.0, 1.5, 40.0]
    series = trajectories(base_walk, 12, states, times, WalkKind.CLASSICAL)
    assert series.shape == (3, 6)
    np.testing.assert_allclose(series[0], [1, 0, 0, 0, 0, 0], atol=1e-12)
    np.testing.assert_allclose(series[1], classical_transition(base_walk, 1.5).matrix[states, 12], atol=1e-12)

    quantum = trajectories(base_walk, 12, states, times, WalkKind.QUANTUM)
    np.testing.assert_allclose(quantum[2], quantum_transition(base_walk, 40.0).matrix[states, 12], atol=1e-12)


def test_evolution_preserves_mass_and_norm(base_walk):
    start = np.zeros(32)
    start[3] = 1.0
    assert evolve_distribution(base_walk, start, 2.0).sum() == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.norm(evolve_state(base_walk, start, 2.0)) == pytest.approx(1.0, abs=1e-12)


def test_oscillatory_amplitude_examples(two_state, base_spec):
    profile = two_state.generator.profile
    assert amplitude_oscillatory(profile, 0, 0, 0.0) == pytest.approx(1.0)
    assert abs(amplitude_oscillatory(profile, 0, 1, 2.3)) ** 2 == pytest.approx(math.sin(Q * 2.3) ** 2, abs=1e-14)

    base = bessel_profile(base_spec, 1.2)
    pi = quantum_transition(eigendecompose(build_generator(base)), 200.0).matrix
    assert abs(amplitude_oscillatory(base, 12, 28, 200.0)) ** 2 == pytest.approx(pi[12, 28], abs=1e-9)


@pytest.mark.parametrize("alpha", [1.0, 1.2, 2.0])
@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_heat_kernel_has_unit_mass(base_spec, alpha, t):
    profile = bessel_profile(base_spec, alpha)
    p, depth = base_spec.p, 40
    spheres = math.fsum(
        p**-m * (1 - 1 / p) * heat_kernel_value(profile, m, t).value for m in range(depth + 1)
    )
    # what the spheres miss is the e^{-t} atom left at the origin
    residual = heat_kernel_ball_mass(profile, depth + 1, t)
    assert residual == pytest.approx(math.exp(-t), abs=1e-8)
    assert spheres + residual == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("p,l", [(2, 1), (2, 3), (2, 5), (3, 3), (5, 2)])
@pytest.mark.parametrize("t", [1.0, 200.0, 10000.0])
def test_independent_paths_agree_on_grid(p, l, t):
    profile = bessel_profile(GroupSpec(p, l), 1.2)
    s = eigendecompose(build_generator(profile))
    np.testing.assert_allclose(
        oscillatory_transition(profile, t).matrix, quantum_transition(s, t).matrix, atol=1e-9
    )
    np.testing.assert_allclose(
        classical_transition_via_heat(profile, t).matrix, classical_transition(s, t).matrix, atol=1e-9
    )
