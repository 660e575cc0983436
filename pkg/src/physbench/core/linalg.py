"""Small dense SPD solve via Cholesky.

Hand-rolled rather than delegated so a non-positive pivot surfaces as a
typed error; systems here stay below ~100 unknowns.
"""

import math

import numpy as np

from physbench.errors import NotSPD


def cholesky_factor(a: np.ndarray) -> np.ndarray:
    """Lower-triangular L with L L^T = a; raises NotSPD on pivot <= 0."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise NotSPD(f"matrix must be square, got {a.shape}")
    lower = np.zeros((n, n))
    for j in range(n):
        d = a[j, j] - lower[j, :j] @ lower[j, :j]
        if d <= 0.0:
            raise NotSPD(f"pivot {d} <= 0 at column {j}")
        lower[j, j] = math.sqrt(d)
        if j + 1 < n:
            lower[j + 1 :, j] = (a[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]) / lower[j, j]
    return lower


def solve_spd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a @ x = b for symmetric positive definite a.

    b may be a vector or a matrix of right-hand sides; the result keeps
    b's shape.
    """
    lower = cholesky_factor(a)
    b = np.asarray(b, dtype=float)
    vec = b.ndim == 1
    rhs = b[:, None] if vec else b
    n = lower.shape[0]
    y = np.zeros_like(rhs)
    for i in range(n):
        y[i] = (rhs[i] - lower[i, :i] @ y[:i]) / lower[i, i]
    x = np.zeros_like(rhs)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - lower[i + 1 :, i] @ x[i + 1 :]) / lower[i, i]
    return x[:, 0] if vec else x
