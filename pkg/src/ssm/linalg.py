"""Dense real-matrix helpers.

Matrices are plain 2-D ``float64`` numpy arrays. The functions here add the
shape/domain checks the rest of the package relies on, plus the
column-stacking ``vec`` convention under which ``kron(P, P) @ vec(Q)``
equals ``vec(P @ Q @ P.T)``.
"""

import sys

import numpy as np

from .errors import CapacityError, DomainError, ShapeError, SingularityError

PIVOT_TOL = 1e-12


def as_matrix(m, name="matrix"):
    """Return ``m`` as a 2-D float64 array with finite entries."""
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = tuple(int(i) for i in np.argwhere(~np.isfinite(arr))[0])
        raise DomainError(f"{name} has a non-finite entry at {bad}")
    return arr


def matmul(a, b):
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def kron(a, b):
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.size == 0 or b.size == 0:
        raise ShapeError(f"kron needs non-empty operands, got {a.shape} and {b.shape}")
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows * cols > sys.maxsize // 8:
        raise CapacityError(f"kron result {rows}x{cols} exceeds addressable memory")
    return np.kron(a, b)


def row_normalize(m):
    """Scale each row to sum to one.

    All-zero rows become the uniform distribution ``1/cols`` so the result is
    always row-stochastic.
    """
    m = as_matrix(m)
    if m.size and m.min() < 0:
        idx = tuple(int(i) for i in np.argwhere(m < 0)[0])
        raise DomainError(f"negative entry {m[idx]!r} at index {idx}")
    sums = m.sum(axis=1, keepdims=True)
    out = np.empty_like(m)
    zero = sums[:, 0] == 0
    out[~zero] = m[~zero] / sums[~zero]
    out[zero] = 1.0 / m.shape[1]
    return out


def vec(m):
    """Column-stack ``m`` into a 1-D vector.

    Entry ``m[k, i]`` lands at position ``n_rows * i + k`` (0-based), which is
    the ordering that makes ``kron(P, P)`` act on ``vec(Q)`` as ``P Q P^T``.
    """
    return as_matrix(m).ravel(order="F").copy()


def unvec(v, rows, cols):
    v = np.asarray(v, dtype=np.float64)
    if v.size != rows * cols:
        raise ShapeError(f"cannot reshape {v.size} values into {rows}x{cols}")
    return v.reshape((rows, cols), order="F").copy()


def solve_dense(a, b):
    """Solve ``a x = b`` by Gaussian elimination with partial pivoting.

    Intended for the small systems of the reference solvers; ``b`` may be a
    vector or a matrix of right-hand sides.
    """
    a = as_matrix(a, "a")
    n = a.shape[0]
    if a.shape[1] != n:
        raise ShapeError(f"solve_dense needs a square matrix, got {a.shape}")
    b = np.asarray(b, dtype=np.float64)
    vector_rhs = b.ndim == 1
    rhs = b.reshape(n, -1) if vector_rhs and b.shape[0] == n else b
    if rhs.ndim != 2 or rhs.shape[0] != n:
        raise ShapeError(f"right-hand side {b.shape} does not match {a.shape}")

    aug = np.hstack([a, rhs]).astype(np.float64)
    tol = PIVOT_TOL * max(1.0, float(np.abs(a).max(initial=0.0)))
    for col in range(n):
        piv = col + int(np.argmax(np.abs(aug[col:, col])))
        if abs(aug[piv, col]) < tol:
            raise SingularityError(f"pivot {aug[piv, col]:.3e} in column {col} below {tol:.1e}")
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        below = aug[col + 1:, col] / aug[col, col]
        aug[col + 1:, col:] -= np.outer(below, aug[col, col:])

    x = np.zeros_like(rhs)
    for row in range(n - 1, -1, -1):
        x[row] = (aug[row, n:] - aug[row, row + 1:n] @ x[row + 1:]) / aug[row, row]
    return x[:, 0] if vector_rhs else x
