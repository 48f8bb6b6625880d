"""Markov/divisibility diagnostics and doubly-stochastic / unistochastic classification."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .config import TOL
from .core import StochasticSystem
from .errors import DimensionError, NotDoublyStochasticError, UnknownTimeError
from .linalg import polar_unitary, project_simplex_columns, unitarity_defect

Verdict = Literal["yes", "no", "unknown"]


def _same_square(*mats: np.ndarray) -> int:
    shapes = {np.shape(m) for m in mats}
    if len(shapes) != 1:
        raise DimensionError(f"matrix shapes differ: {sorted(shapes)}")
    (shape,) = shapes
    if len(shape) != 2 or shape[0] != shape[1]:
        raise DimensionError(f"expected square matrices, got shape {shape}")
    return shape[0]


# ---------------------------------------------------------------------------
# Markov property


def check_markov_triple(g_t, g_tp, g_tpp) -> float:
    """Max-entry residual of ``Gamma(t) - Gamma(t'') Gamma(t')``."""
    _same_square(g_t, g_tp, g_tpp)
    return float(np.abs(np.asarray(g_t) - np.asarray(g_tpp) @ np.asarray(g_tp)).max())


def check_markov_chain(sys: StochasticSystem, dt) -> list[tuple[int, float]]:
    """Compare each grid time ``n*dt`` with the n-th power of ``Gamma(dt)``."""
    g_dt = sys.gamma(dt)
    dt = float(dt)
    if dt <= 0:
        raise UnknownTimeError(dt, sys.times)
    steps = {}
    for t in sys.times:
        k = round(t / dt)
        if k >= 0 and math.isclose(k * dt, t, rel_tol=1e-12, abs_tol=1e-15):
            steps[k] = t
    out = []
    power = np.eye(sys.n)
    for k in range(max(steps, default=-1) + 1):
        if k > 0:
            power = power @ g_dt
        if k in steps:
            out.append((k, float(np.abs(sys.gamma(steps[k]) - power).max())))
    return out


# ---------------------------------------------------------------------------
# weak divisibility


@dataclass(frozen=True)
class DivisibilityReport:
    feasible: bool
    witness: np.ndarray
    residual: float
    iterations: int
    trace: tuple[float, ...] = field(default=(), repr=False)


def _support_polish(support: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """Exact minimizer over matrices vanishing off ``support`` with unit column sums.

    Solves the KKT system of the equality-constrained least-squares problem;
    returns None when the result leaves the nonnegative orthant.
    """
    n = support.shape[0]
    rows, cols = np.nonzero(support)
    k = rows.size
    aat = a @ a.T
    bat = b @ a.T
    kkt = np.zeros((k + n, k + n))
    rhs = np.zeros(k + n)
    same_row = rows[:, None] == rows[None, :]
    kkt[:k, :k] = np.where(same_row, aat[cols[:, None], cols[None, :]], 0.0)
    kkt[:k, k + cols] = np.eye(k)
    kkt[k + cols, np.arange(k)] = 1.0
    rhs[:k] = bat[rows, cols]
    rhs[k:] = 1.0
    sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    if sol[:k].min() < -1e-14:
        return None
    out = np.zeros((n, n))
    out[rows, cols] = np.clip(sol[:k], 0.0, None)
    return out / out.sum(axis=0, keepdims=True)


def solve_divisibility(
    g_t,
    g_tp,
    *,
    max_iter: int = 20_000,
    tol: float = TOL.feasibility,
    record_trace: bool = False,
) -> DivisibilityReport:
    """Search for a column-stochastic ``X`` with ``X @ Gamma(t') = Gamma(t)``.

    Minimizes ``0.5 * ||X A - B||_F^2`` over column-stochastic ``X`` with
    monotone accelerated projected gradient (step ``1/L``, ``L = ||A||_2^2``,
    columns projected onto the simplex), starting from the identity. The
    reported residual never increases between iterations. Once the loop ends
    the support of the iterate is frozen and the equality-constrained problem
    on it is solved exactly; that answer is kept only if it lowers the residual.
    """
    n = _same_square(g_t, g_tp)
    b = np.asarray(g_t, dtype=float)
    a = np.asarray(g_tp, dtype=float)
    lip = float(np.linalg.norm(a, 2)) ** 2
    aat = a @ a.T
    bat = b @ a.T

    def resid(m):
        return float(np.linalg.norm(m @ a - b))

    x = np.eye(n)
    y = x
    mom = 1.0
    residual = resid(x)
    trace = [residual] if record_trace else []
    it = 0
    checkpoint = residual
    while it < max_iter and residual > 1e-13:
        it += 1
        z = project_simplex_columns(y - (y @ aat - bat) / max(lip, 1e-300))
        rz = resid(z)
        mom_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * mom * mom))
        if rz <= residual:
            x_next, r_next = z, rz
        else:
            x_next, r_next = x, residual
            mom_next = 1.0  # restart the momentum after a rejected step
        y = x_next + (mom / mom_next) * (z - x_next) + ((mom - 1.0) / mom_next) * (x_next - x)
        moved = float(np.abs(x_next - x).max())
        x, residual, mom = x_next, r_next, mom_next
        if record_trace:
            trace.append(residual)
        if moved == 0.0 and rz >= residual and float(np.abs(z - x).max()) < 1e-16:
            break
        if it % 1000 == 0:
            # stagnation: less than 0.1% progress over the last 1000 steps
            if residual > checkpoint * (1.0 - 1e-3):
                break
            checkpoint = residual
    if n > 1 and residual > 1e-15:
        for support in (x > 0, np.ones((n, n), dtype=bool)):
            polished = _support_polish(support, a, b)
            if polished is None:
                continue
            rp = resid(polished)
            if rp < residual:
                x, residual = polished, rp
                if record_trace:
                    trace.append(residual)
    return DivisibilityReport(
        feasible=residual <= tol,
        witness=x,
        residual=residual,
        iterations=it,
        trace=tuple(trace),
    )


# ---------------------------------------------------------------------------
# doubly stochastic and unistochastic matrices


def is_doubly_stochastic(m) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or np.iscomplexobj(m):
        return False
    return bool(
        m.min() >= -TOL.bounds
        and np.abs(m.sum(axis=0) - 1).max() <= TOL.stochastic
        and np.abs(m.sum(axis=1) - 1).max() <= TOL.stochastic
    )


def _require_doubly_stochastic(m, size: int | None = None) -> np.ndarray:
    m = np.asarray(m, dtype=float) if not np.iscomplexobj(m) else np.asarray(m)
    if not is_doubly_stochastic(m):
        raise NotDoublyStochasticError("matrix is not doubly stochastic")
    if size is not None and m.shape != (size, size):
        raise DimensionError(f"expected a {size}x{size} matrix, got {m.shape}")
    return m


@dataclass(frozen=True)
class UnistochasticityResult:
    verdict: Verdict
    witness: np.ndarray | None
    defect: float
    method: str = ""
    restart: int | None = None


def witness_defect(u: np.ndarray, m: np.ndarray) -> float:
    """How far ``u`` is from being a unitary whose squared moduli give ``m``."""
    return max(float(np.abs(np.abs(u) ** 2 - m).max()), unitarity_defect(u))


def unistochastic_witness_2x2(m) -> np.ndarray:
    """Real rotation ``[[sqrt x, -sqrt(1-x)], [sqrt(1-x), sqrt x]]`` for ``x = m[0, 0]``."""
    m = _require_doubly_stochastic(m, 2)
    x = min(max(float(m[0, 0]), 0.0), 1.0)
    c, s = math.sqrt(x), math.sqrt(1.0 - x)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _chain_links_gap(m: np.ndarray) -> float:
    """Largest amount by which a row-pair triangle inequality fails (<= 0 when all hold)."""
    worst = -math.inf
    for p in range(3):
        for q in range(p + 1, 3):
            r = np.sqrt(np.clip(m[p] * m[q], 0.0, None))
            worst = max(worst, float(r.max() - (r.sum() - r.max())))
    return worst


def _triangle_phases(r: np.ndarray) -> np.ndarray:
    """Phases ``phi`` with ``sum_k r_k exp(i phi_k) = 0`` for sides obeying the triangle rule."""
    r1, r2, r3 = (float(v) for v in r)
    if r1 * r2 == 0.0:
        alpha = 0.0
    else:
        alpha = math.acos(min(1.0, max(-1.0, (r3 * r3 - r1 * r1 - r2 * r2) / (2 * r1 * r2))))
    v3 = -r1 - r2 * complex(math.cos(alpha), math.sin(alpha))
    return np.array([0.0, alpha, math.atan2(v3.imag, v3.real) if abs(v3) > 0 else 0.0])


def _witness_3x3(m: np.ndarray) -> np.ndarray:
    # first row real, second row phased so the two are orthogonal,
    # third row is the conjugated cross product (unit norm, orthogonal to both)
    root = np.sqrt(np.clip(m, 0.0, None))
    row1 = root[0].astype(complex)
    row2 = root[1] * np.exp(1j * _triangle_phases(root[0] * root[1]))
    row3 = np.conj(np.cross(row1, row2))
    u = np.vstack([row1, row2, row3])
    for k in range(3):
        nz = np.flatnonzero(np.abs(u[k]) > 1e-300)
        if nz.size:
            lead = u[k, nz[0]]
            u[k] *= np.conj(lead) / abs(lead)
    return u


def unistochastic_verdict_3x3(m) -> UnistochasticityResult:
    """Exact 3x3 decision by the chain-links (triangle) criterion.

    For each pair of rows ``p, q`` the lengths ``r_k = sqrt(m[p,k] m[q,k])``
    must close a triangle. When they do, an explicit witness is built from
    the triangle's angles.
    """
    m = _require_doubly_stochastic(m, 3)
    gap_rows = _chain_links_gap(m)
    gap_cols = _chain_links_gap(m.T)
    rows_ok, cols_ok = gap_rows <= 1e-12, gap_cols <= 1e-12
    if rows_ok != cols_ok:
        raise AssertionError(
            f"row and column chain-links tests disagree (gaps {gap_rows:.3e}, {gap_cols:.3e})"
        )
    if not rows_ok:
        return UnistochasticityResult("no", None, gap_rows, method="3x3 criterion")
    u = _witness_3x3(m)
    return UnistochasticityResult("yes", u, witness_defect(u, m), method="3x3 criterion")


def _moduli_projection(u: np.ndarray, root: np.ndarray) -> np.ndarray:
    mag = np.abs(u)
    phase = np.where(mag > 0, u / np.where(mag > 0, mag, 1.0), 1.0)
    return root * phase


def search_unistochastic(
    m,
    restarts: int = 20,
    max_iter: int = 2000,
    seed: int = 0,
    tol: float = TOL.witness,
) -> UnistochasticityResult:
    """Alternating projections between fixed moduli ``sqrt(m)`` and the unitary group.

    Attempt 0 starts from zero phases; attempts ``1..restarts`` start from
    phases drawn uniformly in ``[0, 2pi)`` by ``numpy.random.default_rng(seed)``.
    Success needs both ``max |U|^2 - m| <= tol`` and ``U`` unitary to ``tol``.
    The search never answers "no".
    """
    m = _require_doubly_stochastic(m)
    n = m.shape[0]
    if n < 2:
        raise DimensionError("search needs n >= 2")
    root = np.sqrt(np.clip(m, 0.0, None))
    rng = np.random.default_rng(seed)
    best: tuple[float, int, np.ndarray] | None = None
    for attempt in range(restarts + 1):
        if attempt == 0:
            x = root.astype(complex)
        else:
            x = root * np.exp(1j * rng.uniform(0.0, 2 * np.pi, size=(n, n)))
        defect, u = math.inf, x
        stall = 0
        for _ in range(max_iter):
            u = polar_unitary(x)
            new = witness_defect(u, m)
            stall = stall + 1 if new > defect * (1 - 1e-10) else 0
            defect = min(defect, new)
            if defect <= tol or stall >= 50:
                break
            x = _moduli_projection(u, root)
        if best is None or defect < best[0]:
            best = (defect, attempt, u)
        if defect <= tol:
            break
    defect, attempt, u = best
    if defect <= tol:
        return UnistochasticityResult("yes", u, defect, method="search", restart=attempt)
    return UnistochasticityResult("unknown", None, defect, method="search", restart=attempt)


def classify_unistochastic(m, *, restarts: int = 20, seed: int = 0) -> UnistochasticityResult:
    """Best available verdict for any square matrix."""
    m = np.asarray(m, dtype=float)
    if not is_doubly_stochastic(m):
        # every unistochastic matrix is doubly stochastic
        return UnistochasticityResult("no", None, math.inf, method="not doubly stochastic")
    n = m.shape[0]
    if n == 1:
        return UnistochasticityResult("yes", np.ones((1, 1), complex), 0.0, method="trivial")
    if n == 2:
        u = unistochastic_witness_2x2(m)
        return UnistochasticityResult("yes", u, witness_defect(u, m), method="2x2 formula")
    if n == 3:
        return unistochastic_verdict_3x3(m)
    return search_unistochastic(m, restarts=restarts, seed=seed)


__all__ = [
    "DivisibilityReport",
    "UnistochasticityResult",
    "check_markov_chain",
    "check_markov_triple",
    "classify_unistochastic",
    "is_doubly_stochastic",
    "search_unistochastic",
    "solve_divisibility",
    "unistochastic_verdict_3x3",
    "unistochastic_witness_2x2",
    "witness_defect",
]
