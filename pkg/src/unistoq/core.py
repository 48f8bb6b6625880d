"""Finite generalized stochastic systems.

A system is a configuration count ``n``, a time grid containing 0, one
column-stochastic transition matrix per grid time (``gamma[i, j]`` is the
probability of configuration ``i`` at time ``t`` given ``j`` at time 0), an
initial probability vector and a set of random variables.

Configurations are 0-based throughout the Python API.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from .config import TOL, Limits
from .errors import DimensionError, UndefinedVariableError, UnknownTimeError


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeGrid:
    times: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self) -> Iterator[float]:
        return iter(self.times)

    def __contains__(self, t) -> bool:
        return float(t) in self.times

    def index(self, t) -> int:
        try:
            return self.times.index(float(t))
        except ValueError:
            raise UnknownTimeError(t, self.times) from None

    @property
    def zero_index(self) -> int:
        return self.index(0.0)

    def is_strictly_increasing(self) -> bool:
        return all(a < b for a, b in zip(self.times, self.times[1:]))


@dataclass(frozen=True)
class RandomVariable:
    """Magnitudes ``a_i(t)`` stored as a dense table, one length-n row per time."""

    name: str
    values: Mapping[float, np.ndarray]

    def __post_init__(self):
        object.__setattr__(
            self, "values", {float(t): _frozen(v) for t, v in self.values.items()}
        )

    def at(self, t) -> np.ndarray:
        try:
            return self.values[float(t)]
        except KeyError:
            raise UndefinedVariableError(
                f"random variable {self.name!r} is not defined at time {t!r}"
            ) from None

    @classmethod
    def from_function(
        cls, name: str, grid: TimeGrid, n: int, fn: Callable[[int, float], float]
    ) -> "RandomVariable":
        return cls(name, {t: [fn(i, t) for i in range(n)] for t in grid})

    @classmethod
    def constant(cls, name: str, grid: TimeGrid, n: int, c: float = 1.0) -> "RandomVariable":
        return cls.from_function(name, grid, n, lambda i, t: c)

    @classmethod
    def indicator(cls, name: str, grid: TimeGrid, n: int, k: int) -> "RandomVariable":
        return cls.from_function(name, grid, n, lambda i, t: 1.0 if i == k else 0.0)


@dataclass(frozen=True)
class StochasticSystem:
    n: int
    grid: TimeGrid
    transitions: Mapping[float, np.ndarray]
    p0: np.ndarray
    variables: Mapping[str, RandomVariable] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.grid, TimeGrid):
            object.__setattr__(self, "grid", TimeGrid(self.grid))
        object.__setattr__(
            self, "transitions", {float(t): _frozen(g) for t, g in self.transitions.items()}
        )
        object.__setattr__(self, "p0", _frozen(self.p0))
        object.__setattr__(self, "variables", dict(self.variables))

    @property
    def times(self) -> tuple[float, ...]:
        return self.grid.times

    def gamma(self, t) -> np.ndarray:
        if float(t) not in self.grid:
            raise UnknownTimeError(t, self.grid.times)
        try:
            return self.transitions[float(t)]
        except KeyError:
            raise UnknownTimeError(t, self.grid.times) from None

    def with_variables(self, *variables: RandomVariable) -> "StochasticSystem":
        merged = dict(self.variables)
        merged.update({v.name: v for v in variables})
        return StochasticSystem(self.n, self.grid, self.transitions, self.p0, merged)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    equation: str
    location: str
    magnitude: float

    def __str__(self):
        return f"{self.equation} at {self.location}: magnitude {self.magnitude:.3e}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __len__(self) -> int:
        return len(self.violations)

    def __iter__(self) -> Iterator[Violation]:
        return iter(self.violations)

    def equations(self) -> set[str]:
        return {v.equation for v in self.violations}


def _excess(x: np.ndarray, lo: float, hi: float) -> float:
    return float(max(0.0, lo - x.min(), x.max() - hi)) if x.size else 0.0


def validate_system(sys: StochasticSystem, limits: Limits | None = None) -> ValidationReport:
    """Check every structural invariant of ``sys`` and report what is broken.

    Nothing is raised; each violation carries the name of the condition it
    breaks, where, and by how much.
    """
    limits = limits or Limits.from_env()
    out: list[Violation] = []
    add = lambda eq, loc, mag: out.append(Violation(eq, loc, float(mag)))  # noqa: E731

    n = sys.n
    if not isinstance(n, (int, np.integer)) or n < 1:
        add("configuration count", "n", abs(float(n) - 1) if np.isscalar(n) else 1.0)
        return ValidationReport(tuple(out))
    if n > limits.max_n:
        add("size cap", "n", n - limits.max_n)

    grid = sys.grid
    if not grid.is_strictly_increasing():
        worst = max((a - b for a, b in zip(grid.times, grid.times[1:])), default=0.0)
        add("time ordering", "times", max(worst, 0.0))
    if 0.0 not in grid:
        add("initial time", "times", min((abs(t) for t in grid), default=1.0))

    p0 = np.asarray(sys.p0, dtype=float)
    if p0.shape != (n,):
        add("initial distribution shape", "p0", abs(p0.size - n))
    else:
        mag = _excess(p0, 0.0, 1.0)
        if mag > TOL.bounds:
            add("probability bounds", "p0", mag)
        mag = abs(p0.sum() - 1.0)
        if mag > TOL.normalization:
            add("initial normalization", "p0", mag)

    for t in grid:
        if t not in sys.transitions:
            add("stochastic map domain", f"t={t!r}", 1.0)
            continue
        g = sys.transitions[t]
        if g.shape != (n, n):
            add("transition shape", f"t={t!r}", abs(g.size - n * n))
            continue
        mag = _excess(g, 0.0, 1.0)
        if mag > TOL.bounds:
            i, j = np.unravel_index(np.argmax(np.maximum(-g, g - 1)), g.shape)
            add("probability bounds", f"t={t!r} entry ({i},{j})", mag)
        col = np.abs(g.sum(axis=0) - 1.0)
        if col.max() > TOL.stochastic:
            add("column normalization", f"t={t!r} column {int(col.argmax())}", col.max())
        if t == 0.0:
            diff = np.abs(g - np.eye(n))
            if diff.max() > 0.0:
                i, j = np.unravel_index(diff.argmax(), diff.shape)
                add("initial condition", f"t=0.0 entry ({i},{j})", diff.max())
    for t in sys.transitions:
        if t not in grid:
            add("stochastic map domain", f"t={t!r} (not a grid time)", 1.0)

    for name, var in sys.variables.items():
        for t in grid:
            a = var.values.get(t)
            if a is None or a.shape != (n,):
                add("random variable domain", f"{name} at t={t!r}", 1.0)
    return ValidationReport(tuple(out))


# ---------------------------------------------------------------------------
# probabilities and expectations


def evolve_probabilities(sys: StochasticSystem, t) -> np.ndarray:
    """``p(t) = Gamma(t) p(0)``."""
    return sys.gamma(t) @ sys.p0


def _resolve_variable(sys: StochasticSystem, a: RandomVariable | str) -> RandomVariable:
    if isinstance(a, str):
        try:
            return sys.variables[a]
        except KeyError:
            raise UndefinedVariableError(f"system has no random variable named {a!r}") from None
    return a


def expectation(sys: StochasticSystem, a: RandomVariable | str, t) -> float:
    var = _resolve_variable(sys, a)
    p = evolve_probabilities(sys, t)
    mags = var.at(t)
    if mags.shape != p.shape:
        raise DimensionError(
            f"random variable {var.name!r} has {mags.size} magnitudes, system has n={sys.n}"
        )
    return float(mags @ p)


def probability_vector_ok(p: Sequence[float]) -> bool:
    p = np.asarray(p, dtype=float)
    return (
        p.ndim == 1
        and _excess(p, 0.0, 1.0) <= TOL.bounds
        and abs(p.sum() - 1.0) <= TOL.normalization
    )


def is_column_stochastic(g: np.ndarray) -> bool:
    g = np.asarray(g, dtype=float)
    return (
        g.ndim == 2
        and g.shape[0] == g.shape[1]
        and _excess(g, 0.0, 1.0) <= TOL.bounds
        and np.abs(g.sum(axis=0) - 1.0).max() <= TOL.stochastic
    )
