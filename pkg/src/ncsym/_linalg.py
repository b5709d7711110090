"""Small linear-algebra helpers shared across the package.

Everything here is a thin, opinionated wrapper around numpy/scipy with the
thresholds used throughout the library pinned in one place.
"""
from __future__ import annotations

import numpy as np

# Relative singular-value cutoff used for every rank / null-space decision.
RANK_RTOL = 1e-10


def nullspace(a: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis of the null space of ``a``, columns of the result.

    Rank is decided by singular values below ``rtol`` times the largest one.
    An all-zero (or empty) matrix has a full null space.
    """
    a = np.atleast_2d(np.asarray(a))
    if a.size == 0:
        return np.eye(a.shape[1], dtype=complex)
    u, s, vh = np.linalg.svd(a)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return np.eye(a.shape[1], dtype=complex)
    rank = int(np.sum(s > rtol * smax))
    return vh[rank:].conj().T


def numerical_rank(a: np.ndarray, rtol: float = RANK_RTOL) -> int:
    a = np.atleast_2d(np.asarray(a))
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def lstsq_with_residual(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float]:
    """Least-squares solve of ``a x = b`` returning ``(x, max-abs residual)``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    res = a @ x - b
    resmax = float(np.max(np.abs(res))) if res.size else 0.0
    return x, resmax


def max_abs(a: np.ndarray) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0
