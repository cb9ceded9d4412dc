"""Dense Gaussian elimination with partial pivoting."""

from __future__ import annotations

import numpy as np

from .errors import SingularMatrixError

PIVOT_TOLERANCE = 1e-12


def solve(a: np.ndarray, b: np.ndarray, tol: float = PIVOT_TOLERANCE) -> np.ndarray:
    """Solve ``a @ x = b`` (``b`` may hold several right-hand sides as columns).

    Raises SingularMatrixError when a pivot's magnitude falls below ``tol``.
    """
    a = np.array(a, dtype=np.float64)
    b = np.array(b, dtype=np.float64)
    vector = b.ndim == 1
    if vector:
        b = b[:, None]
    n = a.shape[0]
    if a.shape != (n, n) or b.shape[0] != n:
        raise ValueError(f"shape mismatch: a {a.shape}, b {b.shape}")
    aug = np.hstack([a, b])
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(aug[col:, col])))
        if abs(aug[pivot, col]) < tol:
            raise SingularMatrixError(f"pivot {aug[pivot, col]:.3e} in column {col} is below {tol:g}")
        if pivot != col:
            aug[[col, pivot]] = aug[[pivot, col]]
        factors = aug[col + 1 :, col] / aug[col, col]
        aug[col + 1 :, col:] -= np.outer(factors, aug[col, col:])
    x = np.empty_like(b)
    for row in range(n - 1, -1, -1):
        x[row] = (aug[row, n:] - aug[row, row + 1 : n] @ x[row + 1 :]) / aug[row, row]
    return x[:, 0] if vector else x


def inverse(a: np.ndarray, tol: float = PIVOT_TOLERANCE) -> np.ndarray:
    return solve(a, np.eye(np.asarray(a).shape[0]), tol)
