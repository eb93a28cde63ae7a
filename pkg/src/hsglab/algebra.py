"""Polynomials, truth tables, matrices and curves over GF(2^k).

Point indexing: a point (x_1, ..., x_m) in F_p^m has index
sum_j value(x_j) * p^(j-1), i.e. coordinate 1 is the least significant
digit.  This is the order in which truth tables list their evaluations and
it matches the element enumeration of field.py.
"""

from __future__ import annotations

import io
from typing import Iterable, Sequence

import numpy as np

from . import gfnum
from .field import FieldElem, FieldParams


# ---------------------------------------------------------------------------
# univariate polynomials
# ---------------------------------------------------------------------------

class UniPoly:
    """Univariate polynomial, coefficients low-degree-first as values."""

    __slots__ = ("coeffs", "params")

    def __init__(self, coeffs: Sequence[int] | np.ndarray, params: FieldParams):
        arr = np.asarray(coeffs, dtype=np.int64)
        nz = np.nonzero(arr)[0]
        self.coeffs = arr[: int(nz[-1]) + 1].copy() if nz.size else np.zeros(0, dtype=np.int64)
        self.params = params

    @classmethod
    def constant(cls, c: FieldElem) -> "UniPoly":
        return cls([c.val], c.params)

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def coeff_elems(self) -> list[FieldElem]:
        return [FieldElem(int(c), self.params) for c in self.coeffs]

    def eval_val(self, x: int) -> int:
        r = 0
        for c in self.coeffs[::-1]:
            r = self.params.mul(r, x) ^ int(c)
        return r

    def eval_many(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        r = np.zeros_like(xs)
        for c in self.coeffs[::-1]:
            r = gfnum.mul(self.params, r, xs) ^ int(c)
        return r

    def __call__(self, x: FieldElem) -> FieldElem:
        return FieldElem(self.eval_val(x.val), self.params)

    def __add__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros(n, dtype=np.int64)
        a[: len(self.coeffs)] = self.coeffs
        a[: len(other.coeffs)] ^= other.coeffs
        return UniPoly(a, self.params)

    __sub__ = __add__

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        if self.is_zero() or other.is_zero():
            return UniPoly([], self.params)
        out = np.zeros(len(self.coeffs) + len(other.coeffs) - 1, dtype=np.int64)
        for i, c in enumerate(self.coeffs):
            if c:
                out[i: i + len(other.coeffs)] ^= gfnum.mul(self.params, int(c), other.coeffs)
        return UniPoly(out, self.params)

    def scale(self, c: int) -> "UniPoly":
        return UniPoly(gfnum.mul(self.params, self.coeffs, c), self.params)

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        p = self.params
        rem = self.coeffs.copy()
        dlead = p.inv(int(other.coeffs[-1]))
        q = np.zeros(max(len(rem) - other.degree, 0), dtype=np.int64)
        while len(rem) and len(rem) - 1 >= other.degree:
            shift = len(rem) - 1 - other.degree
            f = p.mul(int(rem[-1]), dlead)
            q[shift] = f
            rem[shift: shift + len(other.coeffs)] ^= gfnum.mul(p, f, other.coeffs)
            nz = np.nonzero(rem)[0]
            rem = rem[: int(nz[-1]) + 1] if nz.size else rem[:0]
        return UniPoly(q, p), UniPoly(rem, p)

    def __eq__(self, other):
        return (isinstance(other, UniPoly) and self.params == other.params
                and len(self.coeffs) == len(other.coeffs)
                and bool(np.all(self.coeffs == other.coeffs)))

    def __hash__(self):
        return hash((self.params, tuple(int(c) for c in self.coeffs)))

    def __repr__(self):
        return f"UniPoly({list(map(int, self.coeffs))})"


def uni_interpolate(points: Iterable[tuple[FieldElem, FieldElem]]) -> UniPoly:
    """The unique polynomial of degree < len(points) through the given points.

    Raises ValueError on a repeated abscissa.
    """
    pts = list(points)
    if not pts:
        raise ValueError("need at least one point")
    params = pts[0][0].params
    xs = [a.val for a, _ in pts]
    ys = [b.val for _, b in pts]
    if len(set(xs)) != len(xs):
        raise ValueError("repeated abscissa in interpolation input")
    return interpolate_vals(params, xs, ys)


def interpolate_vals(params: FieldParams, xs: Sequence[int], ys: Sequence[int]) -> UniPoly:
    """Newton interpolation on raw values (distinct xs assumed)."""
    n = len(xs)
    # divided differences; in char 2 subtraction is addition
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            num = coef[i] ^ coef[i - 1]
            den = xs[i] ^ xs[i - j]
            coef[i] = params.mul(num, params.inv(den))
    poly = UniPoly([], params)
    for i in range(n - 1, -1, -1):
        # poly = poly * (X - xs[i]) + coef[i]
        poly = poly * UniPoly([xs[i], 1], params) + UniPoly([coef[i]], params)
    return poly


# ---------------------------------------------------------------------------
# truth tables of multivariate polynomials
# ---------------------------------------------------------------------------

def lex_index(params: FieldParams, vals: Sequence[int]) -> int:
    idx = 0
    for v in reversed(vals):
        idx = idx * params.order + v
    return idx


def lex_point(params: FieldParams, m: int, idx: int) -> tuple[int, ...]:
    p = params.order
    out = []
    for _ in range(m):
        out.append(idx % p)
        idx //= p
    return tuple(out)


class TruthTable:
    """A polynomial F_p^m -> F_p stored as its p^m evaluations.

    `values[i]` is the evaluation at the point with index i (see the module
    docstring for the indexing convention).  `degree_bound` is the declared
    total-degree bound; `verify_degree` checks it by full interpolation and
    is only meant for desk-scale tables.
    """

    __slots__ = ("params", "m", "degree_bound", "values")

    def __init__(self, params: FieldParams, m: int, degree_bound: int,
                 values: Sequence[int] | np.ndarray):
        self.params = params
        self.m = m
        self.degree_bound = degree_bound
        arr = np.asarray(values, dtype=np.int64)
        if arr.shape != (params.order ** m,):
            raise ValueError(f"expected {params.order ** m} values, got {arr.shape}")
        self.values = arr

    @property
    def p(self) -> int:
        return self.params.order

    @classmethod
    def from_function(cls, params: FieldParams, m: int, degree_bound: int, fn) -> "TruthTable":
        p = params.order
        vals = [fn(lex_point(params, m, i)) for i in range(p ** m)]
        return cls(params, m, degree_bound, vals)

    def eval_vals(self, point: Sequence[int]) -> int:
        return int(self.values[lex_index(self.params, point)])

    def eval(self, point: Sequence[FieldElem]) -> FieldElem:
        if len(point) != self.m:
            raise ValueError(f"expected {self.m} coordinates, got {len(point)}")
        return FieldElem(self.eval_vals([x.val for x in point]), self.params)

    def coefficient_tensor(self) -> np.ndarray:
        """Monomial coefficients, shape (p,)*m; axis j is the exponent of
        coordinate m-j (numpy C-order puts coordinate 1 on the last axis)."""
        p = self.params.order
        vinv = gfnum.invert_matrix(self.params, gfnum.vandermonde(
            self.params, np.arange(p), p))
        tensor = self.values.reshape((p,) * self.m)
        for axis in range(self.m):
            moved = np.moveaxis(tensor, axis, 0).reshape(p, -1)
            moved = gfnum.xor_reduce(
                gfnum.mul(self.params, vinv[:, :, None], moved[None, :, :]), axis=1)
            tensor = np.moveaxis(moved.reshape((p,) * self.m), 0, axis)
        return tensor

    def total_degree(self) -> int:
        tensor = self.coefficient_tensor()
        idx = np.nonzero(tensor)
        if len(idx[0]) == 0:
            return -1
        return int(max(sum(t) for t in zip(*idx)))

    def verify_degree(self) -> bool:
        return self.total_degree() <= self.degree_bound


def tt_eval(table: TruthTable, point: Sequence[FieldElem]) -> FieldElem:
    """Table lookup at a point given as field elements."""
    return table.eval(point)


def save_truth_table(table: TruthTable, fh: io.TextIOBase) -> None:
    """Write the table format: header "p m degree_bound", one hex value per
    line, in point-index order."""
    fh.write(f"{table.p} {table.m} {table.degree_bound}\n")
    width = (table.params.k + 3) // 4
    for v in table.values:
        fh.write(format(int(v), f"0{width}x") + "\n")


def load_truth_table(fh: io.TextIOBase, params: FieldParams | None = None) -> TruthTable:
    from .field import gf
    header = fh.readline().split()
    if len(header) != 3:
        raise ValueError("bad truth-table header")
    p, m, degree_bound = map(int, header)
    if params is None:
        params = gf(p.bit_length() - 1)
    if params.order != p:
        raise ValueError("field size mismatch between header and params")
    values = [int(line, 16) for line in fh if line.strip()]
    return TruthTable(params, m, degree_bound, values)


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

class MatrixFp:
    """Square matrix over F_p (values array of shape (m, m))."""

    __slots__ = ("a", "params")

    def __init__(self, a, params: FieldParams):
        arr = np.asarray(a, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("matrix must be square")
        self.a = arr
        self.params = params

    @classmethod
    def identity(cls, m: int, params: FieldParams) -> "MatrixFp":
        eye = np.zeros((m, m), dtype=np.int64)
        np.fill_diagonal(eye, 1)
        return cls(eye, params)

    @property
    def m(self) -> int:
        return self.a.shape[0]

    def __mul__(self, other: "MatrixFp") -> "MatrixFp":
        return MatrixFp(gfnum.matmul(self.params, self.a, other.a), self.params)

    def vec(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64)
        if v.shape != (self.m,):
            raise ValueError("vector dimension mismatch")
        return gfnum.matvec(self.params, self.a, v)

    def pow(self, e: int) -> "MatrixFp":
        if e < 0:
            raise ValueError("negative matrix power")
        result = MatrixFp.identity(self.m, self.params)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        return (isinstance(other, MatrixFp) and self.params == other.params
                and bool(np.all(self.a == other.a)))

    def __hash__(self):
        return hash((self.params, self.a.tobytes()))

    def __repr__(self):
        return f"MatrixFp({self.a.tolist()})"


def mat_pow_vec(a: MatrixFp, e: int, v) -> np.ndarray:
    """A^e v by repeated squaring of the matrix; e >= 0."""
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    v = np.asarray(v, dtype=np.int64)
    if v.shape != (a.m,):
        raise ValueError("vector dimension mismatch")
    if e == 0:
        return v.copy()
    return a.pow(e).vec(v)


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------

class Curve:
    """A map F_p -> F_p^m given by m univariate component polynomials."""

    __slots__ = ("components", "params")

    def __init__(self, components: Sequence[UniPoly]):
        if not components:
            raise ValueError("curve needs at least one component")
        self.components = tuple(components)
        self.params = components[0].params

    @property
    def m(self) -> int:
        return len(self.components)

    @property
    def degree(self) -> int:
        return max(c.degree for c in self.components)

    def eval_val(self, t: int) -> tuple[int, ...]:
        return tuple(c.eval_val(t) for c in self.components)

    def eval_table(self) -> np.ndarray:
        """All p evaluations, shape (p, m)."""
        ts = np.arange(self.params.order)
        return np.stack([c.eval_many(ts) for c in self.components], axis=1)

    def __call__(self, t: FieldElem) -> tuple[FieldElem, ...]:
        return tuple(FieldElem(v, self.params) for v in self.eval_val(t.val))


def curve_eval(curve: Curve, t: FieldElem) -> tuple[FieldElem, ...]:
    return curve(t)


def curve_apply_matrix(a: MatrixFp, curve: Curve) -> Curve:
    """The curve t -> A * C(t); component-wise linear combination keeps the
    degree bound."""
    if a.m != curve.m:
        raise ValueError("matrix/curve dimension mismatch")
    params = curve.params
    deg = max(c.degree for c in curve.components)
    ncoef = deg + 1 if deg >= 0 else 1
    coef = np.zeros((curve.m, ncoef), dtype=np.int64)
    for j, c in enumerate(curve.components):
        coef[j, : len(c.coeffs)] = c.coeffs
    out = gfnum.matmul(params, a.a, coef)
    return Curve([UniPoly(row, params) for row in out])


def line_restriction(params: FieldParams, m: int, fn, x_vals: Sequence[int],
                     y_vals: Sequence[int]) -> UniPoly:
    """Interpolate t -> fn(x + t*y) through all p parameter values.

    `fn` maps a value tuple to a value.  Used by the degree audits: the
    result's degree is at most the total degree of the underlying
    polynomial (and at most p-1 regardless).
    """
    p = params.order
    ys = []
    for t in range(p):
        pt = tuple(x_vals[j] ^ params.mul(t, y_vals[j]) for j in range(m))
        ys.append(fn(pt))
    return interpolate_vals(params, list(range(p)), ys)
