"""Vectorized linear algebra over GF(2^k) value arrays.

All functions work on numpy int64 arrays holding element *values* (see
field.py for the encoding) together with the FieldParams they belong to.
Addition is XOR; multiplication routes through the field's log/exp tables.
These are the work-horses behind the decoders and the truth-table builders,
where per-element FieldElem objects would be too slow.
"""

from __future__ import annotations

import numpy as np

from .field import FieldParams


def mul(params: FieldParams, a, b):
    return params.ops.mul_arr(a, b)


def inv(params: FieldParams, a):
    return params.ops.inv_arr(a)


def matmul(params: FieldParams, a, b):
    """GF matrix product of 2-d value arrays."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    prod = mul(params, a[:, :, None], b[None, :, :])
    return xor_reduce(prod, axis=1)


def matvec(params: FieldParams, a, v):
    a = np.asarray(a, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    return xor_reduce(mul(params, a, v[None, :]), axis=1)


def xor_reduce(arr, axis):
    return np.bitwise_xor.reduce(arr, axis=axis)


def row_reduce(params: FieldParams, mat):
    """Row-reduce a value matrix in place (on a copy); returns (R, pivot_cols).

    R is in reduced row echelon form, pivot_cols lists the pivot column of
    each nonzero row in order.
    """
    m = np.array(mat, dtype=np.int64)
    rows, cols = m.shape
    pivot_cols = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            m[[r, p]] = m[[p, r]]
        m[r] = mul(params, m[r], int(params.inv(int(m[r, c]))))
        col = m[:, c].copy()
        col[r] = 0
        m ^= mul(params, col[:, None], m[r][None, :])
        pivot_cols.append(c)
        r += 1
    return m, pivot_cols


def solve(params: FieldParams, a, b):
    """One solution of A x = b over the field, or None if inconsistent.

    Free variables are set to zero.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    aug = np.concatenate([a, b[:, None]], axis=1)
    red, pivots = row_reduce(params, aug)
    ncols = a.shape[1]
    if ncols in pivots:
        return None
    x = np.zeros(ncols, dtype=np.int64)
    for row, c in enumerate(pivots):
        x[c] = red[row, ncols]
    return x


def nullspace_vector(params: FieldParams, a):
    """A nonzero x with A x = 0, or None if the kernel is trivial."""
    a = np.asarray(a, dtype=np.int64)
    red, pivots = row_reduce(params, a)
    ncols = a.shape[1]
    free = [c for c in range(ncols) if c not in pivots]
    if not free:
        return None
    f = free[0]
    x = np.zeros(ncols, dtype=np.int64)
    x[f] = 1
    for row, c in enumerate(pivots):
        x[c] = red[row, f]  # char 2: -v == v
    return x


def invert_matrix(params: FieldParams, a):
    """Inverse of a square value matrix, or None if singular."""
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[0]
    eye = np.zeros((n, n), dtype=np.int64)
    np.fill_diagonal(eye, 1)
    red, pivots = row_reduce(params, np.concatenate([a, eye], axis=1))
    if pivots != list(range(n)):
        return None
    return red[:, n:]


def vandermonde(params: FieldParams, xs, ncols: int):
    """Matrix V[i, j] = xs[i]^j as values, for polynomial interpolation."""
    xs = np.asarray(xs, dtype=np.int64)
    cols = [np.ones(len(xs), dtype=np.int64)]
    for _ in range(1, ncols):
        cols.append(mul(params, cols[-1], xs))
    return np.stack(cols, axis=1)
