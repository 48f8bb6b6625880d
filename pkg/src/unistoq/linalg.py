"""Small dense linear-algebra helpers: simplex projection, polar factor, matrix exponential."""
from __future__ import annotations

import numpy as np


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def unitarity_defect(u: np.ndarray) -> float:
    """max-entry deviation of both U^dag U and U U^dag from the identity."""
    u = np.asarray(u)
    eye = np.eye(u.shape[0])
    return float(max(np.abs(dagger(u) @ u - eye).max(), np.abs(u @ dagger(u) - eye).max()))


def doubly_stochastic_defect(m: np.ndarray) -> float:
    m = np.asarray(m, dtype=float)
    return float(
        max(
            np.abs(m.sum(axis=0) - 1).max(),
            np.abs(m.sum(axis=1) - 1).max(),
            max(0.0, -m.min()),
        )
    )


def project_simplex_columns(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of every column of ``v`` onto the probability simplex.

    Sort-based algorithm: for a column ``x`` sorted in decreasing order ``u``,
    the threshold is ``(cumsum(u)[rho] - 1) / (rho + 1)`` with ``rho`` the last
    index where ``u - (cumsum(u) - 1) / (k + 1)`` stays positive.
    """
    v = np.asarray(v, dtype=float)
    n = v.shape[0]
    u = -np.sort(-v, axis=0)
    css = np.cumsum(u, axis=0) - 1.0
    k = np.arange(1, n + 1)[:, None]
    cond = u - css / k > 0
    rho = np.count_nonzero(cond, axis=0)
    theta = css[rho - 1, np.arange(v.shape[1])] / rho
    return np.maximum(v - theta[None, :], 0.0)


def polar_unitary(x: np.ndarray, max_iter: int = 50, tol: float = 1e-12) -> np.ndarray:
    """Unitary polar factor of a square matrix.

    Newton iteration ``X <- (X + X^{-dag}) / 2``. Falls back to the SVD
    factor ``W V^dag`` when ``x`` is numerically singular or the iteration does
    not settle within ``max_iter`` steps.
    """
    x = np.asarray(x, dtype=complex)
    if np.linalg.cond(x) < 1e12:
        cur = x
        for _ in range(max_iter):
            try:
                nxt = 0.5 * (cur + dagger(np.linalg.inv(cur)))
            except np.linalg.LinAlgError:
                break
            step = np.linalg.norm(nxt - cur)
            cur = nxt
            if step <= tol:
                return cur
    w, _, vh = np.linalg.svd(x)
    return w @ vh


def expm_taylor(a: np.ndarray, order: int = 12, target_norm: float = 0.5) -> np.ndarray:
    """Matrix exponential by scaling and squaring of a truncated Taylor series.

    Kept independent of any eigendecomposition so it can serve as an oracle.
    """
    a = np.asarray(a, dtype=complex)
    norm = np.linalg.norm(a, 1)
    squarings = 0
    if norm > target_norm:
        squarings = int(np.ceil(np.log2(norm / target_norm)))
    scaled = a / (2.0**squarings)
    result = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, order + 1):
        term = term @ scaled / k
        result = result + term
    for _ in range(squarings):
        result = result @ result
    return result
