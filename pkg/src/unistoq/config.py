"""Numerical tolerances and size limits shared across the package."""
from __future__ import annotations

import os
from dataclasses import dataclass

ENV_MAX_N = "UNISTOQ_MAX_N"


@dataclass(frozen=True)
class Tolerances:
    # entrywise bounds on probabilities and transition entries
    bounds: float = 1e-12
    # column sums of transition matrices, row/column sums of doubly stochastic matrices
    stochastic: float = 1e-10
    # normalization of probability vectors
    normalization: float = 1e-12
    # identities that hold up to ordinary float arithmetic
    arithmetic: float = 1e-12
    # imaginary residue allowed on provably-real traces
    imaginary: float = 1e-14
    # eigenvalue floor for density matrices
    positivity: float = 1e-10
    # divisibility feasibility threshold (Frobenius residual)
    feasibility: float = 1e-6
    # unistochastic witness acceptance
    witness: float = 1e-8
    # Gram-Schmidt survival threshold during unitary completion
    completion: float = 1e-6
    # post-dilation checks
    marginalization: float = 1e-10
    unitarity: float = 1e-10


@dataclass(frozen=True)
class Limits:
    max_n: int = 32
    max_dilation_n: int = 12

    @classmethod
    def from_env(cls) -> "Limits":
        """Read the size cap from ``UNISTOQ_MAX_N``; it overrides both caps."""
        raw = os.environ.get(ENV_MAX_N)
        if raw is None or not raw.strip():
            return cls()
        cap = int(raw)
        if cap < 1:
            raise ValueError(f"{ENV_MAX_N} must be a positive integer, got {raw!r}")
        return cls(max_n=cap, max_dilation_n=cap)


TOL = Tolerances()
