import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unistoq.analysis import (
    check_markov_chain,
    check_markov_triple,
    classify_unistochastic,
    is_doubly_stochastic,
    search_unistochastic,
    solve_divisibility,
    unistochastic_verdict_3x3,
    unistochastic_witness_2x2,
    witness_defect,
)
from unistoq.errors import DimensionError, NotDoublyStochasticError, UnknownTimeError
from unistoq.generators import markov_chain_system, random_stochastic_matrix, random_stochastic_system
from unistoq.linalg import unitarity_defect

AVG2 = np.full((2, 2), 0.5)
HALF_CIRCULANT = 0.5 * np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0]], dtype=float)
Z = np.exp(2j * np.pi / 3)
FOURIER3 = np.array([[1, 1, 1], [1, Z, Z**2], [1, Z**2, Z]]) / np.sqrt(3)


def haar_unitary(n, rng):
    q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def birkhoff_sample(rng, n=3, concentration=0.7):
    perms = [np.eye(n)[list(p)] for p in itertools.permutations(range(n))]
    w = rng.dirichlet(np.full(len(perms), concentration))
    return sum(a * p for a, p in zip(w, perms))


# ---------------------------------------------------------------------------
# Markov property


def test_markov_triple_identity():
    i = np.eye(3)
    assert check_markov_triple(i, i, i) == 0.0


def test_markov_triple_squared_chain(rng):
    g = random_stochastic_matrix(4, rng)
    assert check_markov_triple(g @ g, g, g) <= 1e-14


def test_markov_triple_averaging_gap():
    assert check_markov_triple(np.eye(2), AVG2, AVG2) == pytest.approx(0.5, abs=1e-15)


def test_markov_triple_dimension_mismatch():
    with pytest.raises(DimensionError):
        check_markov_triple(np.eye(2), np.eye(3), np.eye(2))


def test_markov_chain_generator_passes(rng):
    sys = markov_chain_system(random_stochastic_matrix(3, rng), 5, np.full(3, 1 / 3), dt=0.5)
    report = check_markov_chain(sys, 0.5)
    assert [k for k, _ in report] == [0, 1, 2, 3, 4, 5]
    assert report[0][1] == 0.0 and report[1][1] == 0.0
    assert max(r for _, r in report) <= 1e-12


def test_markov_chain_detects_non_markov_system():
    sys = random_stochastic_system(3, [0.0, 1.0, 2.0], seed=4)
    report = dict(check_markov_chain(sys, 1.0))
    assert report[2] > 1e-3


def test_markov_chain_requires_dt_in_grid():
    sys = random_stochastic_system(2, [0.0, 1.0], seed=0)
    with pytest.raises(UnknownTimeError):
        check_markov_chain(sys, 0.5)


# ---------------------------------------------------------------------------
# divisibility


def test_divisibility_same_matrix_is_identity(rng):
    g = random_stochastic_matrix(4, rng)
    rep = solve_divisibility(g, g)
    assert rep.feasible
    assert rep.residual <= 1e-10
    np.testing.assert_array_equal(rep.witness, np.eye(4))


def test_divisibility_rank_obstruction():
    # X @ AVG2 has equal columns for every X, so the residual is at least 0.5
    rep = solve_divisibility(np.eye(2), AVG2)
    assert not rep.feasible
    assert rep.residual >= 0.5 - 1e-12


@pytest.mark.parametrize("seed", range(6))
def test_divisibility_markov_square(seed):
    g = random_stochastic_matrix(4, np.random.default_rng(seed))
    rep = solve_divisibility(g @ g, g)
    assert rep.feasible
    assert rep.residual <= 1e-6
    np.testing.assert_allclose(rep.witness, g, atol=1e-4)


@given(st.integers(0, 2**31), st.integers(2, 5))
@settings(max_examples=15)
def test_divisibility_trace_monotone_and_witness_stochastic(seed, n):
    rng = np.random.default_rng(seed)
    a, b = random_stochastic_matrix(n, rng), random_stochastic_matrix(n, rng)
    rep = solve_divisibility(b, a, record_trace=True, max_iter=3000)
    trace = np.array(rep.trace)
    assert np.all(np.diff(trace) <= 0.0)
    assert trace[-1] == rep.residual
    assert rep.witness.min() >= -1e-12
    np.testing.assert_allclose(rep.witness.sum(axis=0), 1.0, atol=1e-8)
    assert rep.feasible == (rep.residual <= 1e-6)


def test_divisibility_dimension_mismatch():
    with pytest.raises(DimensionError):
        solve_divisibility(np.eye(2), np.eye(3))


# ---------------------------------------------------------------------------
# doubly stochastic


@pytest.mark.parametrize("perm", list(itertools.permutations(range(4))))
def test_permutations_are_doubly_stochastic(perm):
    assert is_doubly_stochastic(np.eye(4)[list(perm)])


def test_column_stochastic_but_not_doubly():
    assert not is_doubly_stochastic(np.array([[0.9, 0.5], [0.1, 0.5]]))


def test_non_square_is_not_doubly_stochastic():
    assert not is_doubly_stochastic(np.ones((2, 3)) / 2)


@given(st.integers(1, 7), st.integers(0, 2**31))
def test_unitary_moduli_are_doubly_stochastic(n, seed):
    u = haar_unitary(n, np.random.default_rng(seed))
    assert is_doubly_stochastic(np.abs(u) ** 2)


# ---------------------------------------------------------------------------
# unistochastic witnesses


def test_2x2_witness_extremes():
    np.testing.assert_array_equal(unistochastic_witness_2x2(np.eye(2)), np.eye(2))
    np.testing.assert_array_equal(
        unistochastic_witness_2x2(np.array([[0.0, 1.0], [1.0, 0.0]])), [[0, -1], [1, 0]]
    )


def test_2x2_witness_quarter():
    u = unistochastic_witness_2x2(np.array([[0.25, 0.75], [0.75, 0.25]]))
    np.testing.assert_allclose(u, [[0.5, -np.sqrt(0.75)], [np.sqrt(0.75), 0.5]], atol=1e-16)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(2), atol=1e-15)


@given(st.floats(0, 1))
def test_2x2_witness_is_exact(x):
    m = np.array([[x, 1 - x], [1 - x, x]])
    u = unistochastic_witness_2x2(m)
    assert unitarity_defect(u) <= 1e-15
    assert np.abs(np.abs(u) ** 2 - m).max() <= 1e-15


def test_2x2_witness_rejects_non_doubly_stochastic():
    with pytest.raises(NotDoublyStochasticError):
        unistochastic_witness_2x2(np.array([[0.9, 0.5], [0.1, 0.5]]))


def test_half_circulant_is_not_unistochastic():
    res = unistochastic_verdict_3x3(HALF_CIRCULANT)
    assert res.verdict == "no"
    assert res.witness is None
    assert res.defect == pytest.approx(0.5)


def test_uniform_3x3_witness_is_fourier():
    res = unistochastic_verdict_3x3(np.full((3, 3), 1 / 3))
    assert res.verdict == "yes"
    np.testing.assert_allclose(res.witness, FOURIER3, atol=1e-15)
    assert unitarity_defect(res.witness) <= 1e-12


def test_identity_3x3_witness_is_identity():
    res = unistochastic_verdict_3x3(np.eye(3))
    assert res.verdict == "yes"
    np.testing.assert_allclose(res.witness, np.eye(3), atol=0)


def test_3x3_verdict_rejects_bad_input():
    with pytest.raises(NotDoublyStochasticError):
        unistochastic_verdict_3x3(np.array([[0.9, 0.5, 0], [0.1, 0.5, 0], [0, 0, 1]]))
    with pytest.raises(DimensionError):
        unistochastic_verdict_3x3(np.eye(2))


@given(st.integers(0, 2**31))
def test_3x3_moduli_of_unitaries_are_accepted_with_witness(seed):
    m = np.abs(haar_unitary(3, np.random.default_rng(seed))) ** 2
    res = unistochastic_verdict_3x3(m)
    assert res.verdict == "yes"
    assert witness_defect(res.witness, m) <= 1e-8


@pytest.mark.parametrize("perm", list(itertools.permutations(range(4))))
def test_search_returns_permutation_itself(perm):
    p = np.eye(4)[list(perm)]
    res = search_unistochastic(p)
    assert res.verdict == "yes"
    assert res.defect == 0.0
    np.testing.assert_array_equal(res.witness, p)


def test_search_finds_uniform_3x3():
    res = search_unistochastic(np.full((3, 3), 1 / 3), seed=0)
    assert res.verdict == "yes"
    assert res.defect <= 1e-8


def test_search_cannot_certify_half_circulant():
    res = search_unistochastic(HALF_CIRCULANT, restarts=20, seed=0)
    assert res.verdict == "unknown"
    assert res.defect >= 0.05


def test_search_reproducible_per_seed():
    m = np.abs(haar_unitary(4, np.random.default_rng(1))) ** 2
    a = search_unistochastic(m, seed=9)
    b = search_unistochastic(m, seed=9)
    assert a.verdict == b.verdict and a.defect == b.defect and a.restart == b.restart


@pytest.mark.parametrize("seed", range(4))
def test_search_finds_4x4_unistochastic(seed):
    m = np.abs(haar_unitary(4, np.random.default_rng(100 + seed))) ** 2
    res = search_unistochastic(m, seed=seed)
    assert res.verdict == "yes"
    assert np.abs(np.abs(res.witness) ** 2 - m).max() <= 1e-8
    assert unitarity_defect(res.witness) <= 1e-8


def test_search_never_says_no_for_large_n(rng):
    m = birkhoff_sample(rng, n=4, concentration=0.3)
    assert search_unistochastic(m, restarts=3, max_iter=200).verdict in ("yes", "unknown")


@pytest.mark.parametrize("seed", range(12))
def test_criterion_and_search_agree(seed):
    m = birkhoff_sample(np.random.default_rng(seed))
    verdict = unistochastic_verdict_3x3(m)
    search = search_unistochastic(m, seed=seed)
    if verdict.verdict == "no":
        assert search.verdict == "unknown" and search.defect > 1e-8
    else:
        assert search.verdict == "yes"


def test_classify_dispatch():
    assert classify_unistochastic(np.array([[0.9, 0.5], [0.1, 0.5]])).verdict == "no"
    assert classify_unistochastic(np.array([[0.3, 0.7], [0.7, 0.3]])).method == "2x2 formula"
    assert classify_unistochastic(HALF_CIRCULANT).method == "3x3 criterion"
    assert classify_unistochastic(np.eye(4)).method == "search"
