"""Stinespring dilation of a stochastic system into a unistochastic one.

Index conventions (0-based): a dilated configuration is a pair ``(i, a)`` with
``i`` a system configuration and ``a`` an ancilla configuration in
``range(n**2)``; the ancilla index itself packs ``(beta, m)`` as
``a = beta * n + m``. Flattened, ``(i, beta, m) -> (i * n + beta) * n + m``.

Isometry column ``(j, l)`` (flattened ``j * n + l``) is placed at full column
``(j, beta=j, m=l)``. The anchored ancilla indices of ``j`` are ``j * n + l``
for every ``l``; the designated anchor is ``l = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .config import TOL, Limits
from .core import StochasticSystem, TimeGrid, validate_system
from .errors import (
    CompletionError,
    DimensionError,
    InvalidSystemError,
    NumericalInvariantError,
    SizeLimitError,
    UnknownTimeError,
)
from .hilbert import KrausSet, build_evolution_operator, kraus_from_evolution
from .linalg import dagger, doubly_stochastic_defect, unitarity_defect


def _frozen(a, dtype=complex) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


def placed_positions(n: int) -> np.ndarray:
    """Full column index receiving isometry column ``j * n + l``."""
    j, l = np.divmod(np.arange(n * n), n)
    return (j * n + j) * n + l


def anchor(n: int, j: int) -> int:
    return j * n


def anchored_indices(n: int, j: int) -> list[int]:
    return [j * n + l for l in range(n)]


@dataclass(frozen=True)
class PartialIsometry:
    entries: np.ndarray  # (n**3, n**2)
    n: int
    time: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries))

    def isometry_defect(self) -> float:
        v = self.entries
        return float(np.abs(dagger(v) @ v - np.eye(v.shape[1])).max())


@dataclass(frozen=True)
class DilatedUnitary:
    entries: np.ndarray  # (n**3, n**3)
    n: int
    time: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries))

    @property
    def placement(self) -> dict[tuple[int, int], tuple[int, int, int]]:
        return {(j, l): (j, j, l) for j in range(self.n) for l in range(self.n)}


@dataclass(frozen=True)
class DilatedSystem:
    n: int
    ancilla_dim: int
    total_dim: int
    grid: TimeGrid
    unitaries: Mapping[float, DilatedUnitary]
    transitions: Mapping[float, np.ndarray]
    p_tilde: Mapping[float, np.ndarray]
    anchor: tuple[int, ...]

    @property
    def times(self) -> tuple[float, ...]:
        return self.grid.times


def build_partial_isometry(kraus: KrausSet) -> PartialIsometry:
    """``V[(i, beta, m), (j, l)] = K_beta[i, j] * delta(l, m)``."""
    n = kraus.n
    k = kraus.operators  # k[beta, i, j]
    v = np.einsum("bij,ml->ibmjl", k, np.eye(n))
    return PartialIsometry(v.reshape(n**3, n**2), n, kraus.time)


def complete_to_unitary(v: PartialIsometry, *, threshold: float = TOL.completion) -> DilatedUnitary:
    """Extend the isometry to a square unitary.

    The isometry columns go to their placed positions; the remaining columns
    come from Gram-Schmidt (two orthogonalization passes per candidate) over
    the standard basis in ascending order, keeping candidates whose residual
    norm is at least ``threshold`` and filling the free positions in ascending
    order. For the identity isometry this reproduces the identity exactly.
    """
    defect = v.isometry_defect()
    if defect > 1e-8:
        raise CompletionError(f"input is not an isometry (V^dag V deviates by {defect:.3e})")
    n = v.n
    dim, k0 = n**3, n**2
    need = dim - k0
    basis = np.zeros((dim, dim), dtype=complex)
    basis[:, :k0] = v.entries
    count = k0
    kept = []
    for cand in range(dim):
        if len(kept) == need:
            break
        q = basis[:, :count]
        r = -(q @ np.conj(q[cand, :]))
        r[cand] += 1.0
        r = r - q @ (dagger(q) @ r)
        norm = np.linalg.norm(r)
        if norm >= threshold:
            r = r / norm
            basis[:, count] = r
            count += 1
            kept.append(r)
    if len(kept) < need:
        raise CompletionError(
            f"only {len(kept)} of {need} completion columns survived; input is not an isometry"
        )
    u = np.zeros((dim, dim), dtype=complex)
    placed = placed_positions(n)
    u[:, placed] = v.entries
    free = np.setdiff1d(np.arange(dim), placed)
    u[:, free] = np.column_stack(kept) if kept else np.zeros((dim, 0))
    return DilatedUnitary(u, n, v.time)


def dilated_transition_matrix(u: DilatedUnitary) -> np.ndarray:
    return np.abs(u.entries) ** 2


def dilated_dictionary_probability(u: DilatedUnitary, i: int, j: int, jp: int) -> float:
    """Partial-trace dictionary, evaluated as ``sum_{i'} |U[(i, i'), (j, jp)]|^2``."""
    n = u.n
    na = n * n
    for idx, bound, name in ((i, n, "i"), (j, n, "j"), (jp, na, "jp")):
        if not 0 <= idx < bound:
            raise IndexError(f"{name}={idx} out of range [0, {bound})")
    block = u.entries[i * na : (i + 1) * na, j * na + jp]
    return float(np.sum(np.abs(block) ** 2))


def _dilate_at(gamma: np.ndarray, phases, t: float) -> tuple[DilatedUnitary, np.ndarray]:
    theta = build_evolution_operator(gamma, phases, time=t)
    u = complete_to_unitary(build_partial_isometry(kraus_from_evolution(theta)))
    return u, dilated_transition_matrix(u)


def dilate_system(
    sys: StochasticSystem,
    phases: Mapping[float, np.ndarray] | None = None,
    *,
    limits: Limits | None = None,
) -> DilatedSystem:
    """Dilate every grid time: Theta -> Kraus -> isometry -> unitary -> |U|^2."""
    limits = limits or Limits.from_env()
    report = validate_system(sys, limits)
    if not report.ok:
        raise InvalidSystemError(report)
    n = sys.n
    if n > limits.max_dilation_n:
        raise SizeLimitError(f"n={n} exceeds the dilation cap {limits.max_dilation_n}")
    phases = {float(k): v for k, v in (phases or {}).items()}
    na = n * n
    anchors = tuple(anchor(n, j) for j in range(n))
    cols = [j * na + anchors[j] for j in range(n)]
    unitaries, transitions, p_tilde = {}, {}, {}
    for t in sys.times:
        u, g = _dilate_at(sys.gamma(t), phases.get(t), t)
        unitaries[t] = u
        transitions[t] = _frozen(g, float)
        p_tilde[t] = _frozen(g[:, cols] @ sys.p0, float)
    dsys = DilatedSystem(n, na, n**3, sys.grid, unitaries, transitions, p_tilde, anchors)
    residual = verify_marginalization(dsys, sys)
    if residual > TOL.marginalization:
        raise NumericalInvariantError(f"marginalization residual {residual:.3e}")
    return dsys


def verify_marginalization(d: DilatedSystem, sys: StochasticSystem) -> float:
    """max over (i, j, t) of ``|sum_{i'} G~[(i,i'), (j, anchor_j)] - Gamma_ij|``."""
    n = d.n
    if sys.n != n or set(d.transitions) != set(sys.times):
        raise DimensionError("dilated system was not built from this stochastic system")
    worst = 0.0
    for t in sys.times:
        g4 = np.asarray(d.transitions[t]).reshape(n, n * n, n, n * n)
        marg = g4.sum(axis=1)[:, np.arange(n), list(d.anchor)]
        worst = max(worst, float(np.abs(marg - sys.gamma(t)).max()))
    return worst


def subsystem_marginals(d: DilatedSystem, t) -> tuple[np.ndarray, np.ndarray]:
    """System and ancilla marginals of the dilated distribution at ``t``."""
    if float(t) not in d.p_tilde:
        raise UnknownTimeError(t, d.times)
    joint = np.asarray(d.p_tilde[float(t)]).reshape(d.n, d.ancilla_dim)
    return joint.sum(axis=1), joint.sum(axis=0)


@dataclass(frozen=True)
class DilationDefects:
    unitarity: float
    double_stochasticity: float
    modulus: float
    marginalization: float
    anchor_spread: float

    def passes(self, tol: float = TOL.unitarity) -> bool:
        return max(
            self.unitarity, self.double_stochasticity, self.marginalization
        ) <= tol


def dilation_defects(d: DilatedSystem, sys: StochasticSystem) -> DilationDefects:
    """Worst-case defects over the grid, used by reports and acceptance checks."""
    uni = dbl = mod = spread = 0.0
    n = d.n
    for t in d.times:
        u = d.unitaries[t]
        g = d.transitions[t]
        uni = max(uni, unitarity_defect(u.entries))
        dbl = max(dbl, doubly_stochastic_defect(g))
        mod = max(mod, float(np.abs(np.abs(u.entries) ** 2 - g).max()))
        for i in range(n):
            for j in range(n):
                vals = [dilated_dictionary_probability(u, i, j, a) for a in anchored_indices(n, j)]
                spread = max(spread, max(vals) - min(vals))
    return DilationDefects(uni, dbl, mod, verify_marginalization(d, sys), spread)

