"""Dense exact linear algebra over Z/4Z and F2.

Matrices are plain ``numpy`` integer arrays; every function reduces its
inputs into the target residue range before working and returns fresh
arrays.  Sizes stay small (at most 20 x 20), so nothing here is
bit-packed.
"""

from __future__ import annotations

import numpy as np


class NotInvertible(ArithmeticError):
    """Raised when a Z/4 matrix has no inverse (its reduction mod 2 is singular)."""


def z4(m) -> np.ndarray:
    return np.asarray(m, dtype=np.int64) % 4


def f2(m) -> np.ndarray:
    return np.asarray(m, dtype=np.int64) % 2


def eye(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def mul_z4(*ms) -> np.ndarray:
    out = z4(ms[0])
    for m in ms[1:]:
        out = (out @ z4(m)) % 4
    return out


def mul_f2(*ms) -> np.ndarray:
    out = f2(ms[0])
    for m in ms[1:]:
        out = (out @ f2(m)) % 2
    return out


def rref_f2(m) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form over F2.

    Returns the reduced matrix (zero rows kept at the bottom) and the list
    of pivot columns.
    """
    r = f2(m).copy()
    if r.ndim == 1:
        r = r.reshape(1, -1)
    rows, cols = r.shape
    pivots: list[int] = []
    row = 0
    for col in range(cols):
        if row == rows:
            break
        hits = np.nonzero(r[row:, col])[0]
        if hits.size == 0:
            continue
        p = row + int(hits[0])
        if p != row:
            r[[row, p]] = r[[p, row]]
        others = np.nonzero(r[:, col])[0]
        for i in others:
            if i != row:
                r[i] ^= r[row]
        pivots.append(col)
        row += 1
    return r, pivots


def rank_f2(m) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return len(rref_f2(m)[1])


def row_space_f2(m) -> np.ndarray:
    """Canonical basis (nonzero RREF rows) of the row span of ``m``."""
    r, pivots = rref_f2(m)
    return r[: len(pivots)]


def intersect_dim_f2(a, b) -> int:
    """dim(span(a) & span(b)) for two spanning sets given as rows."""
    a = f2(a).reshape(-1, np.shape(a)[-1])
    b = f2(b).reshape(-1, np.shape(b)[-1])
    return rank_f2(a) + rank_f2(b) - rank_f2(np.vstack([a, b]))


def invert_z4(m) -> np.ndarray:
    """Inverse over Z/4 by Gauss-Jordan elimination with unit pivots.

    Units of Z/4 are 1 and 3 (each its own inverse).  A unit pivot exists
    in every column exactly when the reduction mod 2 is invertible.
    """
    a = z4(m)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    aug = np.hstack([a, eye(n)])
    for col in range(n):
        units = [i for i in range(col, n) if aug[i, col] % 2 == 1]
        if not units:
            raise NotInvertible(f"no unit pivot in column {col}")
        p = units[0]
        if p != col:
            aug[[col, p]] = aug[[p, col]]
        aug[col] = (aug[col] * aug[col, col]) % 4
        for i in range(n):
            if i != col and aug[i, col]:
                aug[i] = (aug[i] - aug[i, col] * aug[col]) % 4
    return aug[:, n:]


def det_z4(m) -> int:
    """Determinant mod 4, via the integer determinant (Bareiss elimination)."""
    a = [[int(x) for x in row] for row in z4(m)]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return (sign * a[n - 1][n - 1]) % 4


def solve_right_z4(a, b) -> np.ndarray:
    """Solve ``a @ x = b`` over Z/4 for a tall ``a`` that has a unit-determinant
    maximal minor (i.e. the columns of ``a`` span a direct summand).

    Raises ValueError when the system is inconsistent.
    """
    a = z4(a)
    b = z4(b)
    rows = unit_minor_rows(a)
    if rows is None:
        raise NotInvertible("columns do not span a direct summand")
    x = mul_z4(invert_z4(a[rows]), b[rows])
    if not np.array_equal(mul_z4(a, x), b):
        raise ValueError("inconsistent system over Z/4")
    return x


def unit_minor_rows(a) -> list[int] | None:
    """Row indices of a square minor of the tall matrix ``a`` invertible mod 2.

    Returns None if the columns of ``a`` are dependent mod 2.
    """
    a = f2(a)
    ncols = a.shape[1]
    # pivot rows of a.T over F2 pick out a maximal independent set of rows of a
    _, pivots = rref_f2(a.T)
    if len(pivots) < ncols:
        return None
    return pivots


def to_key(m) -> bytes:
    return np.ascontiguousarray(m, dtype=np.int8).tobytes()
