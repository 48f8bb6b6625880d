import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from unistoq.analysis import is_doubly_stochastic, solve_divisibility
from unistoq.core import TimeGrid, validate_system
from unistoq.errors import DimensionError
from unistoq.generators import (
    FiniteRDS,
    PermutationSpec,
    hamiltonian_from_permutation,
    markov_chain_system,
    permutation_power_interpolation,
    permutation_unistochastic_system,
    random_finite_rds,
    random_stochastic_system,
    rds_to_stochastic_system,
)
from unistoq.linalg import expm_taylor, unitarity_defect

SWAP = PermutationSpec(2, ((0, 1),))


def random_permutation(n, seed):
    return PermutationSpec.from_images(np.random.default_rng(seed).permutation(n))


# ---------------------------------------------------------------------------
# permutation specs


def test_from_cycles_fills_fixed_points():
    p = PermutationSpec.from_cycles(4, [(0, 2)])
    assert sorted(p.cycles) == [(0, 2), (1,), (3,)]


def test_matrix_sends_each_element_to_its_image():
    p = PermutationSpec(3, ((0, 1, 2),))
    m = p.matrix()
    np.testing.assert_array_equal(m @ [1, 0, 0], [0, 1, 0])
    np.testing.assert_array_equal(m @ [0, 0, 1], [1, 0, 0])


@pytest.mark.parametrize("images", list(itertools.permutations(range(4))))
def test_from_images_round_trip(images):
    m = PermutationSpec.from_images(images).matrix()
    for k, img in enumerate(images):
        assert m[img, k] == 1


def test_bad_cycles_rejected():
    with pytest.raises(ValueError):
        PermutationSpec(3, ((0, 1), (1, 2)))
    with pytest.raises(ValueError):
        PermutationSpec(3, ((0, 1),))


@pytest.mark.parametrize("seed", range(5))
def test_eigensystem_diagonalizes(seed):
    p = random_permutation(6, seed)
    theta, v = p.eigensystem()
    assert unitarity_defect(v) <= 1e-14
    assert np.all(theta > -np.pi) and np.all(theta <= np.pi)
    np.testing.assert_allclose(p.matrix() @ v, v * np.exp(1j * theta), atol=1e-14)


# ---------------------------------------------------------------------------
# interpolation


def test_interpolation_endpoints():
    p = random_permutation(5, 3)
    np.testing.assert_array_equal(permutation_power_interpolation(p, 0.0, 1.0), np.eye(5))
    assert np.abs(permutation_power_interpolation(p, 1.0, 1.0) - p.matrix()).max() <= 1e-13


def test_swap_half_step():
    u = permutation_power_interpolation(SWAP, 0.5, 1.0)
    expected = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
    np.testing.assert_allclose(u, expected, atol=1e-15)
    np.testing.assert_allclose(np.abs(u) ** 2, np.full((2, 2), 0.5), atol=1e-15)


@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 1000))
def test_interpolation_group_property(a, b, seed):
    p = random_permutation(5, seed)
    lhs = permutation_power_interpolation(p, a, 1.0) @ permutation_power_interpolation(p, b, 1.0)
    rhs = permutation_power_interpolation(p, a + b, 1.0)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


@given(st.floats(0, 10), st.integers(0, 1000))
def test_interpolation_moduli_doubly_stochastic(t, seed):
    u = permutation_power_interpolation(random_permutation(6, seed), t, 0.7)
    assert unitarity_defect(u) <= 1e-13
    assert is_doubly_stochastic(np.abs(u) ** 2)


def test_interpolation_rejects_bad_dt():
    with pytest.raises(ValueError):
        permutation_power_interpolation(SWAP, 1.0, 0.0)
    with pytest.raises(ValueError):
        hamiltonian_from_permutation(SWAP, -1.0)


# ---------------------------------------------------------------------------
# Hamiltonian


def test_identity_hamiltonian_is_zero():
    assert np.abs(hamiltonian_from_permutation(PermutationSpec.from_cycles(3, []), 1.0)).max() == 0.0


def test_swap_hamiltonian_spectrum():
    h = hamiltonian_from_permutation(SWAP, 1.0)
    np.testing.assert_allclose(np.linalg.eigvalsh(h), [-np.pi, 0.0], atol=1e-14)


@pytest.mark.parametrize("seed", range(3))
def test_hamiltonian_generates_permutation(seed):
    p = random_permutation(5, seed)
    dt = 0.8
    h = hamiltonian_from_permutation(p, dt)
    np.testing.assert_allclose(h, h.conj().T, atol=0)
    assert np.abs(expm_taylor(-1j * h * dt) - p.matrix()).max() <= 1e-10
    t = 0.37
    assert np.abs(expm_taylor(-1j * h * t) - permutation_power_interpolation(p, t, dt)).max() <= 1e-10


def test_permutation_system_validates():
    p = random_permutation(4, 1)
    sys = permutation_unistochastic_system(p, [0.0, 0.25, 0.5, 1.0], 1.0, np.full(4, 0.25))
    assert validate_system(sys).ok
    np.testing.assert_array_equal(sys.gamma(0.0), np.eye(4))
    np.testing.assert_allclose(sys.gamma(1.0), p.matrix(), atol=1e-13)


# ---------------------------------------------------------------------------
# Markov chains


def test_markov_chain_cube_against_loops():
    g = np.array([[0.9, 0.2], [0.1, 0.8]])
    sys = markov_chain_system(g, 3, [1.0, 0.0], dt=0.5)
    assert sys.times == (0.0, 0.5, 1.0, 1.5)
    cube = np.zeros((2, 2))
    for i, k, l, j in itertools.product(range(2), repeat=4):
        cube[i, j] += g[i, k] * g[k, l] * g[l, j]
    np.testing.assert_allclose(sys.gamma(1.5), cube, atol=1e-15)


def test_markov_chain_zero_steps_and_errors():
    sys = markov_chain_system(np.array([[0.5, 0.5], [0.5, 0.5]]), 0, [0.5, 0.5])
    assert sys.times == (0.0,)
    np.testing.assert_array_equal(sys.gamma(0.0), np.eye(2))
    with pytest.raises(ValueError):
        markov_chain_system(np.array([[0.5, 0.6], [0.4, 0.4]]), 2, [0.5, 0.5])
    with pytest.raises(ValueError):
        markov_chain_system(np.eye(2), -1, [0.5, 0.5])


@pytest.mark.parametrize("seed", range(3))
def test_markov_chain_consecutive_times_divisible(seed):
    g = 1.0 - np.random.default_rng(seed).random((3, 3))
    g /= g.sum(axis=0)
    sys = markov_chain_system(g, 3, np.full(3, 1 / 3))
    for t, tp in zip(sys.times[1:], sys.times[2:]):
        rep = solve_divisibility(sys.gamma(tp), sys.gamma(t))
        assert rep.feasible
        np.testing.assert_allclose(rep.witness @ sys.gamma(t), sys.gamma(tp), atol=1e-6)


# ---------------------------------------------------------------------------
# finite random dynamical systems


def enumerate_rds(r: FiniteRDS, k: int) -> np.ndarray:
    g = np.zeros((r.n, r.n))
    for w, table in r.omegas:
        for j in range(r.n):
            for i in range(r.n):
                if table[k, j] == i:
                    g[i, j] += w
    return g


@pytest.mark.parametrize("seed", range(6))
def test_rds_matches_enumeration(seed):
    r = random_finite_rds(3, [0.0, 1.0, 2.0], 5, seed)
    sys = rds_to_stochastic_system(r, np.full(3, 1 / 3))
    for k, t in enumerate(r.grid):
        np.testing.assert_array_equal(sys.gamma(t), enumerate_rds(r, k))
    assert validate_system(sys).ok


def test_rds_single_deterministic_map():
    r = FiniteRDS(3, TimeGrid([0.0, 1.0]), ((1.0, [[0, 1, 2], [1, 2, 0]]),))
    sys = rds_to_stochastic_system(r, [1.0, 0.0, 0.0])
    np.testing.assert_array_equal(sys.gamma(1.0), PermutationSpec(3, ((0, 1, 2),)).matrix())


def test_rds_problems_reported():
    r = FiniteRDS(2, TimeGrid([0.0, 1.0]), ((0.5, [[1, 0], [0, 0]]), (0.4, [[0, 1], [2, 1]])))
    problems = r.problems()
    assert any("sum to 1" in s for s in problems)
    assert any("not the identity" in s for s in problems)
    assert any("out of range" in s for s in problems)
    with pytest.raises(ValueError):
        rds_to_stochastic_system(r, [0.5, 0.5])


# ---------------------------------------------------------------------------
# random systems


def test_random_system_deterministic():
    a = random_stochastic_system(4, [0.0, 1.0, 2.0], seed=7, n_variables=2)
    b = random_stochastic_system(4, [0.0, 1.0, 2.0], seed=7, n_variables=2)
    for t in a.times:
        np.testing.assert_array_equal(a.gamma(t), b.gamma(t))
        np.testing.assert_array_equal(a.variables["A1"].at(t), b.variables["A1"].at(t))
    np.testing.assert_array_equal(a.p0, b.p0)


def test_neighbouring_seeds_differ():
    for s in range(100):
        a = random_stochastic_system(3, [0.0, 1.0], seed=s)
        b = random_stochastic_system(3, [0.0, 1.0], seed=s + 1)
        assert not np.array_equal(a.gamma(1.0), b.gamma(1.0))


@given(st.integers(1, 6), st.integers(0, 2**31))
def test_random_system_valid(n, seed):
    sys = random_stochastic_system(n, [0.0, 0.5, 3.0], seed, n_variables=1)
    assert validate_system(sys).ok
    assert sys.gamma(0.5).min() > 0


def test_random_system_rejects_empty():
    with pytest.raises(DimensionError):
        random_stochastic_system(0, [0.0], seed=0)
