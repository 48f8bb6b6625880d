"""Hilbert-space representation of a stochastic system.

Every trace formula here is evaluated literally (projectors, products, trace)
so that comparing it against the entrywise shortcut is a real check.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TOL
from .core import RandomVariable
from .errors import DimensionError, NumericalInvariantError
from .linalg import dagger


def _frozen(a, dtype=complex) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _real(z: complex, what: str) -> float:
    if abs(z.imag) > TOL.imaginary:
        raise NumericalInvariantError(f"{what} has imaginary part {z.imag:.3e}")
    return float(z.real)


def _check_index(i: int, n: int) -> None:
    if not 0 <= i < n:
        raise IndexError(f"configuration index {i} out of range for n={n}")


@dataclass(frozen=True)
class EvolutionOperator:
    entries: np.ndarray
    time: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def column_norm_defect(self) -> float:
        return float(np.abs(np.linalg.norm(self.entries, axis=0) - 1.0).max())


@dataclass(frozen=True)
class DensityMatrix:
    entries: np.ndarray
    time: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def hermiticity_defect(self) -> float:
        return float(np.abs(self.entries - dagger(self.entries)).max())

    def trace_defect(self) -> float:
        return float(abs(np.trace(self.entries) - 1.0))

    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.entries + dagger(self.entries))
        return float(np.linalg.eigvalsh(herm)[0])

    def is_valid(self) -> bool:
        return (
            self.hermiticity_defect() <= TOL.arithmetic
            and self.trace_defect() <= TOL.arithmetic
            and self.min_eigenvalue() >= -TOL.positivity
        )


@dataclass(frozen=True)
class KrausSet:
    operators: np.ndarray  # shape (n, n, n): operators[beta] is K_beta
    time: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "operators", _frozen(self.operators))

    @property
    def n(self) -> int:
        return self.operators.shape[0]

    def __iter__(self):
        return iter(self.operators)

    def completeness_defect(self) -> float:
        total = sum(dagger(k) @ k for k in self.operators)
        return float(np.abs(total - np.eye(self.n)).max())


@dataclass(frozen=True)
class ObservableMatrix:
    diagonal: np.ndarray
    time: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "diagonal", _frozen(self.diagonal, float))

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.diagonal)


def projector(i: int, n: int) -> np.ndarray:
    """Rank-one configuration projector ``e_i e_i^dag``."""
    _check_index(i, n)
    p = np.zeros((n, n))
    p[i, i] = 1.0
    return p


def configuration_pvm(n: int) -> list[np.ndarray]:
    return [projector(i, n) for i in range(n)]


def build_evolution_operator(gamma, phases=None, *, time: float | None = None) -> EvolutionOperator:
    """``Theta_ij = sqrt(Gamma_ij) * exp(i phi_ij)``, zero phases by default.

    At ``time == 0`` only absent or all-zero phases are accepted, so that
    ``Theta(0)`` stays the identity.
    """
    g = np.asarray(gamma, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DimensionError(f"transition matrix must be square, got {g.shape}")
    root = np.sqrt(np.clip(g, 0.0, None))
    if phases is None:
        return EvolutionOperator(root.astype(complex), time)
    phi = np.asarray(phases, dtype=float)
    if phi.shape != g.shape:
        raise DimensionError(f"phase matrix shape {phi.shape} does not match {g.shape}")
    if time == 0.0 and np.any(phi != 0.0):
        raise ValueError("nonzero phases supplied at time 0; Theta(0) must be the identity")
    return EvolutionOperator(root * np.exp(1j * phi), time)


def dictionary_probability(theta: EvolutionOperator, i: int, j: int) -> float:
    """``tr(Theta^dag P_i Theta P_j)``."""
    n = theta.n
    _check_index(i, n)
    _check_index(j, n)
    th = theta.entries
    value = np.trace(dagger(th) @ projector(i, n) @ th @ projector(j, n))
    return _real(complex(value), "dictionary trace")


def initial_density(p0) -> DensityMatrix:
    return DensityMatrix(np.diag(np.asarray(p0, dtype=float)).astype(complex), 0.0)


def evolve_density(theta: EvolutionOperator, rho0: DensityMatrix) -> DensityMatrix:
    if theta.entries.shape != rho0.entries.shape:
        raise DimensionError(
            f"Theta is {theta.entries.shape} but rho(0) is {rho0.entries.shape}"
        )
    th = theta.entries
    return DensityMatrix(th @ rho0.entries @ dagger(th), theta.time)


def born_probability(rho: DensityMatrix, i: int) -> float:
    """``tr(P_i rho)``, clamped to [0, 1] after a range check."""
    n = rho.n
    _check_index(i, n)
    p = _real(complex(np.trace(projector(i, n) @ rho.entries)), "Born trace")
    if not -TOL.positivity <= p <= 1.0 + TOL.positivity:
        raise NumericalInvariantError(f"Born probability {p!r} outside [0, 1]")
    return min(max(p, 0.0), 1.0)


def observable_matrix(a: RandomVariable, t, n: int) -> ObservableMatrix:
    mags = a.at(t)
    if mags.shape != (n,):
        raise DimensionError(f"random variable {a.name!r} has {mags.size} magnitudes, n={n}")
    return ObservableMatrix(mags, float(t))


def expectation_trace(aop: ObservableMatrix, rho: DensityMatrix) -> float:
    """``tr(A rho)``."""
    if aop.diagonal.shape[0] != rho.n:
        raise DimensionError(f"observable has size {aop.diagonal.shape[0]}, rho has {rho.n}")
    return _real(complex(np.trace(aop.matrix @ rho.entries)), "expectation trace")


def kraus_from_evolution(theta: EvolutionOperator) -> KrausSet:
    """``K_beta = Theta P_beta``: keep column beta of Theta, zero elsewhere."""
    n = theta.n
    ops = np.stack([theta.entries @ projector(b, n) for b in range(n)])
    return KrausSet(ops, theta.time)


def apply_channel(kraus: KrausSet, x) -> np.ndarray:
    """Operator-sum map ``X -> sum_beta K_beta X K_beta^dag``."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (kraus.n, kraus.n):
        raise DimensionError(f"input is {x.shape}, channel acts on {kraus.n}x{kraus.n}")
    return sum(k @ x @ dagger(k) for k in kraus.operators)


def kraus_dictionary_probability(kraus: KrausSet, i: int, j: int) -> float:
    """``sum_beta tr(K_beta^dag P_i K_beta P_j)``."""
    n = kraus.n
    pi, pj = projector(i, n), projector(j, n)
    value = sum(np.trace(dagger(k) @ pi @ k @ pj) for k in kraus.operators)
    return _real(complex(value), "Kraus dictionary trace")


def classical_wavefunction(p, phases=None) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    psi = np.sqrt(np.clip(p, 0.0, None)).astype(complex)
    if phases is None:
        return psi
    phi = np.asarray(phases, dtype=float)
    if phi.shape != p.shape:
        raise DimensionError(f"phase vector has shape {phi.shape}, expected {p.shape}")
    return psi * np.exp(1j * phi)
