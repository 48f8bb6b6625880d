"""Constructors for worked examples and test corpora."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import RandomVariable, StochasticSystem, TimeGrid, is_column_stochastic
from .errors import DimensionError


# ---------------------------------------------------------------------------
# permutations


@dataclass(frozen=True)
class PermutationSpec:
    """A permutation of ``range(n)`` as disjoint cycles; ``(a b c)`` sends a->b->c->a."""

    n: int
    cycles: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        cycles = tuple(tuple(int(k) for k in c) for c in self.cycles if len(c))
        seen = [k for c in cycles for k in c]
        if len(seen) != len(set(seen)):
            raise ValueError(f"cycles are not disjoint: {cycles}")
        if set(seen) != set(range(self.n)):
            raise ValueError(f"cycles must cover 0..{self.n - 1} exactly, got {sorted(seen)}")
        object.__setattr__(self, "cycles", cycles)

    @classmethod
    def from_cycles(cls, n: int, cycles: Sequence[Sequence[int]]) -> "PermutationSpec":
        """Like the constructor, but fixed points may be left out."""
        listed = {k for c in cycles for k in c}
        return cls(n, tuple(tuple(c) for c in cycles) + tuple((k,) for k in range(n) if k not in listed))

    @classmethod
    def from_images(cls, images: Sequence[int]) -> "PermutationSpec":
        """Build from the image list ``k -> images[k]``."""
        n = len(images)
        left, cycles = set(range(n)), []
        while left:
            start = min(left)
            cyc, k = [], start
            while k in left:
                left.remove(k)
                cyc.append(k)
                k = int(images[k])
            cycles.append(tuple(cyc))
        return cls(n, tuple(cycles))

    def matrix(self) -> np.ndarray:
        """Column-stochastic permutation matrix: ``M[image(k), k] = 1``."""
        m = np.zeros((self.n, self.n))
        for cyc in self.cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                m[b, a] = 1.0
        return m

    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        """Principal eigenphases in (-pi, pi] and orthonormal eigenvectors (as columns).

        A cycle ``c_0 .. c_{L-1}`` carries the Fourier modes
        ``v_q = L**-0.5 * sum_k exp(-2 pi i q k / L) e_{c_k}`` with eigenvalue
        ``exp(2 pi i q / L)``.
        """
        phases, vecs = [], []
        for cyc in self.cycles:
            size = len(cyc)
            k = np.arange(size)
            for q in range(size):
                theta = 2 * np.pi * q / size
                if theta > np.pi:
                    theta -= 2 * np.pi
                v = np.zeros(self.n, dtype=complex)
                v[list(cyc)] = np.exp(-2j * np.pi * q * k / size) / np.sqrt(size)
                phases.append(theta)
                vecs.append(v)
        return np.array(phases), np.column_stack(vecs)


def permutation_power_interpolation(p: PermutationSpec, t: float, dt: float) -> np.ndarray:
    """Unitary ``Sigma**(t/dt)`` on the principal branch; exactly the identity at ``t == 0``."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    if t == 0:
        return np.eye(p.n, dtype=complex)
    theta, v = p.eigensystem()
    return (v * np.exp(1j * theta * (t / dt))) @ np.conj(v).T


def hamiltonian_from_permutation(p: PermutationSpec, dt: float) -> np.ndarray:
    """Self-adjoint ``H`` with ``exp(-i H t) = Sigma**(t/dt)`` (hbar = 1)."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    theta, v = p.eigensystem()
    h = (v * (-theta / dt)) @ np.conj(v).T
    return 0.5 * (h + np.conj(h).T)


def permutation_unistochastic_system(
    p: PermutationSpec, grid: TimeGrid | Sequence[float], dt: float, p0
) -> StochasticSystem:
    grid = grid if isinstance(grid, TimeGrid) else TimeGrid(grid)
    gammas = {}
    for t in grid:
        if t == 0:
            gammas[t] = np.eye(p.n)
        else:
            gammas[t] = np.abs(permutation_power_interpolation(p, t, dt)) ** 2
    return StochasticSystem(p.n, grid, gammas, p0)


# ---------------------------------------------------------------------------
# Markov chains


def markov_chain_system(g_dt, steps: int, p0, dt: float = 1.0) -> StochasticSystem:
    """Grid ``0, dt, .., steps*dt`` with ``Gamma(k dt)`` the k-th power of ``g_dt``."""
    g_dt = np.asarray(g_dt, dtype=float)
    if not is_column_stochastic(g_dt):
        raise ValueError("g_dt is not a column-stochastic square matrix")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    n = g_dt.shape[0]
    times = [k * dt for k in range(steps + 1)]
    gammas, power = {}, np.eye(n)
    for k, t in enumerate(times):
        if k:
            power = g_dt @ power
        gammas[t] = power
    return StochasticSystem(n, TimeGrid(times), gammas, p0)


# ---------------------------------------------------------------------------
# finite random dynamical systems


@dataclass(frozen=True)
class FiniteRDS:
    """Weighted ensemble of deterministic maps.

    ``omegas[w] = (weight, table)`` where ``table[k, j]`` is the state reached
    at grid time ``k`` from state ``j`` at time 0.
    """

    n: int
    grid: TimeGrid
    omegas: tuple[tuple[float, np.ndarray], ...]

    def __post_init__(self):
        if not isinstance(self.grid, TimeGrid):
            object.__setattr__(self, "grid", TimeGrid(self.grid))
        omegas = []
        for w, table in self.omegas:
            arr = np.array(table, dtype=int)
            arr.setflags(write=False)
            omegas.append((float(w), arr))
        object.__setattr__(self, "omegas", tuple(omegas))

    def problems(self) -> list[str]:
        out = []
        weights = np.array([w for w, _ in self.omegas])
        if weights.size == 0 or weights.min() < 0 or abs(weights.sum() - 1) > 1e-12:
            out.append("weights must be nonnegative and sum to 1")
        shape = (len(self.grid), self.n)
        z = self.grid.zero_index if 0.0 in self.grid else None
        if z is None:
            out.append("grid lacks time 0")
        for idx, (_, table) in enumerate(self.omegas):
            if table.shape != shape:
                out.append(f"omega {idx}: table shape {table.shape}, expected {shape}")
                continue
            if table.min() < 0 or table.max() >= self.n:
                out.append(f"omega {idx}: states out of range")
            if z is not None and not np.array_equal(table[z], np.arange(self.n)):
                out.append(f"omega {idx}: map at time 0 is not the identity")
        return out


def rds_to_stochastic_system(r: FiniteRDS, p0) -> StochasticSystem:
    """``Gamma_ij(t)`` = total weight of the maps sending ``j`` to ``i`` by time ``t``."""
    problems = r.problems()
    if problems:
        raise ValueError("invalid FiniteRDS: " + "; ".join(problems))
    n = r.n
    gammas = {}
    for k, t in enumerate(r.grid):
        if t == 0:
            # every map is the identity here and the weights sum to 1
            gammas[t] = np.eye(n)
            continue
        g = np.zeros((n, n))
        for w, table in r.omegas:
            np.add.at(g, (table[k], np.arange(n)), w)
        gammas[t] = g
    return StochasticSystem(n, r.grid, gammas, p0)


_WEIGHT_DENOM = 2**20


def random_finite_rds(n: int, grid: TimeGrid | Sequence[float], n_omegas: int, seed: int) -> FiniteRDS:
    """Seeded ensemble of ``n_omegas`` random maps.

    Weights are positive multiples of ``2**-20`` so every partial sum is exact
    in floating point.
    """
    grid = grid if isinstance(grid, TimeGrid) else TimeGrid(grid)
    if 0.0 not in grid:
        raise ValueError("grid must contain time 0")
    if not 1 <= n_omegas <= _WEIGHT_DENOM:
        raise ValueError(f"n_omegas must be in [1, {_WEIGHT_DENOM}]")
    rng = np.random.default_rng(seed)
    cuts = np.sort(rng.choice(np.arange(1, _WEIGHT_DENOM), n_omegas - 1, replace=False))
    weights = np.diff(np.concatenate([[0], cuts, [_WEIGHT_DENOM]])) / _WEIGHT_DENOM
    omegas = []
    for w in weights:
        table = rng.integers(0, n, size=(len(grid), n))
        table[grid.zero_index] = np.arange(n)
        omegas.append((w, table))
    return FiniteRDS(n, grid, tuple(omegas))


# ---------------------------------------------------------------------------
# random systems


def random_stochastic_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    g = 1.0 - rng.random((n, n))  # uniform on (0, 1]
    return g / g.sum(axis=0, keepdims=True)


def random_stochastic_system(
    n: int,
    grid: TimeGrid | Sequence[float],
    seed: int,
    n_variables: int = 0,
) -> StochasticSystem:
    """Seeded random system; ``Gamma(0)`` is the identity, other times are independent.

    Uses ``numpy.random.default_rng(seed)`` (PCG64). Optional random variables
    ``A0, A1, ..`` have standard-normal magnitudes.
    """
    if n < 1:
        raise DimensionError("n must be >= 1")
    grid = grid if isinstance(grid, TimeGrid) else TimeGrid(grid)
    rng = np.random.default_rng(seed)
    gammas = {t: np.eye(n) if t == 0 else random_stochastic_matrix(n, rng) for t in grid}
    p0 = 1.0 - rng.random(n)
    p0 /= p0.sum()
    variables = {}
    for k in range(n_variables):
        table = rng.standard_normal((len(grid), n))
        variables[f"A{k}"] = RandomVariable(f"A{k}", dict(zip(grid.times, table)))
    return StochasticSystem(n, grid, gammas, p0, variables)
