"""Dense exact linear algebra over the rationals.

Matrices are numpy arrays with dtype=object holding ``fractions.Fraction``
entries. numpy's ``dot`` works on object arrays, so products stay exact;
everything rank-related goes through a single rref routine to keep pivot
choices deterministic.
"""

from fractions import Fraction

import numpy as np

from .errors import PreconditionError

ZERO = Fraction(0)
ONE = Fraction(1)


def frac(x) -> Fraction:
    """Coerce ints, strings like '3' or '-5/7', and Fractions. Floats are
    rejected so rounding never sneaks into an exact computation."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational scalar")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError("refusing float -> Fraction coercion; convert explicitly")
    raise TypeError(f"cannot interpret {type(x).__name__} as a rational scalar")


def fmat(rows) -> np.ndarray:
    """Build a 2-d object array of Fractions from nested iterables."""
    data = [[frac(x) for x in row] for row in rows]
    if not data:
        return np.empty((0, 0), dtype=object)
    width = len(data[0])
    if any(len(r) != width for r in data):
        raise ValueError("ragged rows")
    out = np.empty((len(data), width), dtype=object)
    for i, row in enumerate(data):
        for j, x in enumerate(row):
            out[i, j] = x
    return out


def fvec(entries) -> np.ndarray:
    out = np.empty(len(entries), dtype=object)
    for i, x in enumerate(entries):
        out[i] = frac(x)
    return out


def fzeros(m: int, n: int) -> np.ndarray:
    out = np.empty((m, n), dtype=object)
    out[...] = ZERO
    return out


def feye(n: int) -> np.ndarray:
    out = fzeros(n, n)
    for i in range(n):
        out[i, i] = ONE
    return out


def mm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # object arrays do not support @, but dot dispatches fine
    return a.dot(b)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ma, na = a.shape
    mb, nb = b.shape
    out = np.empty((ma * mb, na * nb), dtype=object)
    for i in range(ma):
        for j in range(na):
            out[i * mb:(i + 1) * mb, j * nb:(j + 1) * nb] = a[i, j] * b
    return out


def is_zero(a: np.ndarray) -> bool:
    return all(x == 0 for x in a.flat)


def rref(a: np.ndarray):
    """Reduced row echelon form. Returns (R, pivot_columns)."""
    r = a.copy()
    m, n = r.shape
    pivots = []
    row = 0
    for col in range(n):
        if row >= m:
            break
        pivot_row = None
        for i in range(row, m):
            if r[i, col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        if pivot_row != row:
            r[[row, pivot_row]] = r[[pivot_row, row]]
        p = r[row, col]
        if p != 1:
            r[row, :] = r[row, :] * (ONE / p)
        for i in range(m):
            if i != row and r[i, col] != 0:
                r[i, :] = r[i, :] - r[i, col] * r[row, :]
        pivots.append(col)
        row += 1
    return r, pivots


def rank(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return len(rref(a)[1])


def nullspace(a: np.ndarray) -> np.ndarray:
    """Columns form the canonical rref nullspace basis, ordered by free column."""
    m, n = a.shape
    if n == 0:
        return np.empty((0, 0), dtype=object)
    r, pivots = rref(a)
    free = [j for j in range(n) if j not in pivots]
    out = fzeros(n, len(free))
    for idx, fc in enumerate(free):
        out[fc, idx] = ONE
        for row_i, pc in enumerate(pivots):
            out[pc, idx] = -r[row_i, fc]
    return out


def left_nullspace(a: np.ndarray) -> np.ndarray:
    """Rows y with y·a = 0, canonical basis (transpose of nullspace of aᵀ)."""
    return nullspace(a.T).T


def solve(a: np.ndarray, b: np.ndarray):
    """One solution of a·x = b (b may be a matrix), or None if inconsistent."""
    m, n = a.shape
    bb = b if b.ndim == 2 else b.reshape(-1, 1)
    aug = np.concatenate([a, bb], axis=1)
    r, pivots = rref(aug)
    for pc in pivots:
        if pc >= n:
            return None
    x = fzeros(n, bb.shape[1])
    for row_i, pc in enumerate(pivots):
        x[pc, :] = r[row_i, n:]
    return x if b.ndim == 2 else x[:, 0]


def inv(a: np.ndarray) -> np.ndarray:
    m, n = a.shape
    if m != n:
        raise PreconditionError("inverse of a non-square matrix")
    r, pivots = rref(np.concatenate([a, feye(n)], axis=1))
    if len(pivots) != n or pivots != list(range(n)):
        raise PreconditionError("matrix is singular")
    return r[:, n:]


def det(a: np.ndarray) -> Fraction:
    m, n = a.shape
    if m != n:
        raise PreconditionError("determinant of a non-square matrix")
    r = a.copy()
    d = ONE
    for col in range(n):
        pivot_row = None
        for i in range(col, n):
            if r[i, col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            return ZERO
        if pivot_row != col:
            r[[col, pivot_row]] = r[[pivot_row, col]]
            d = -d
        p = r[col, col]
        d *= p
        for i in range(col + 1, n):
            if r[i, col] != 0:
                r[i, col:] = r[i, col:] - (r[i, col] / p) * r[col, col:]
    return d


def to_float(a: np.ndarray) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in a], dtype=float) if a.ndim == 2 \
        else np.array([float(x) for x in a], dtype=float)
