"""List decoding and self-correction primitives.

Everything here works on raw element values (ints) plus a FieldParams; see
field.py for the encoding.  Oracles are callables on value tuples / value
vectors.  Randomness always comes in as a numpy Generator so runs replay.

`sudan_list_decode` returns *exactly* the set of polynomials of degree <= d
agreeing with at least `a` of the given pairs, provided a > sqrt(2*d*b).
Internally it uses Berlekamp-Welch when the threshold lands in the unique-
decoding regime and bivariate interpolation plus Roth-Ruckenstein root
finding otherwise; a brute-force decoder over all coefficient vectors is
kept as an oracle for tests and as a fallback for tiny fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import gfnum
from .algebra import MatrixFp, UniPoly, interpolate_vals, mat_pow_vec
from .field import FieldParams

# An oracle from points to values; a predictor from bit strings to bits.
PointOracle = Callable[[tuple[int, ...]], int]
Predictor = Callable[[int], int]


@dataclass(frozen=True)
class AgreementThreshold:
    """Parameters of one list-decoding instance; b pairs, agreement a,
    degree d.  Valid only when a > sqrt(2*d*b)."""

    b: int
    a: int
    d: int

    def __post_init__(self):
        if self.a * self.a <= 2 * self.d * self.b:
            raise ValueError(
                f"agreement {self.a} too small for degree {self.d} with {self.b} pairs "
                f"(needs a > sqrt(2*d*b) = {math.sqrt(2 * self.d * self.b):.2f})")


def minimal_agreement(b: int, d: int) -> int:
    """Smallest integer agreement satisfying the decoding threshold."""
    return math.isqrt(2 * d * b) + 1


# ---------------------------------------------------------------------------
# Reed-Solomon list decoding
# ---------------------------------------------------------------------------

def sudan_list_decode(pairs: Sequence[tuple[int, int]], d: int, a: int,
                      params: FieldParams, method: str = "auto") -> list[UniPoly]:
    """All polynomials of degree <= d agreeing with >= a of the pairs.

    Pairs must be distinct as a multiset (repeated abscissae with different
    ordinates are fine).  Raises ValueError when the agreement threshold
    violates a > sqrt(2*d*b).
    """
    pairs = list(pairs)
    b = len(pairs)
    AgreementThreshold(b, a, d)
    if len(set(pairs)) != b:
        raise ValueError("duplicate (x, y) pair in decoding input")
    if b == 0 or a > b:
        return []
    if method == "brute":
        return brute_force_list_decode(pairs, d, a, params)
    if d == 0:
        return _decode_constants(pairs, a, params)
    xs = [x for x, _ in pairs]
    distinct = len(set(xs)) == b
    if method == "auto" and distinct and 2 * a > b + d:
        out = _berlekamp_welch(pairs, d, a, params)
    else:
        out = _interpolation_decode(pairs, d, a, params)
        if out is None:  # degenerate corner; exactness is cheap to restore
            if params.order ** (d + 1) <= 1 << 20:
                return brute_force_list_decode(pairs, d, a, params)
            raise RuntimeError("interpolation decoder failed outside brute-force range")
    return sorted(out, key=lambda q: tuple(int(c) for c in q.coeffs))


def _agreement(poly: UniPoly, pairs, params) -> int:
    xs = np.array([x for x, _ in pairs], dtype=np.int64)
    ys = np.array([y for _, y in pairs], dtype=np.int64)
    return int(np.count_nonzero(poly.eval_many(xs) == ys))


def _decode_constants(pairs, a, params):
    counts = {}
    for _, y in pairs:
        counts[y] = counts.get(y, 0) + 1
    return [UniPoly([y], params) for y, c in sorted(counts.items()) if c >= a]


def _berlekamp_welch(pairs, d, a, params):
    """Unique decoding: find N, E with E(x)*y = N(x), deg E <= e, deg N <= e+d.

    In this regime at most one polynomial can reach the agreement bound, and
    for any such polynomial every nullspace solution satisfies N = g*E.
    """
    b = len(pairs)
    e = b - a
    xs = np.array([x for x, _ in pairs], dtype=np.int64)
    ys = np.array([y for _, y in pairs], dtype=np.int64)
    ve = gfnum.vandermonde(params, xs, e + 1)
    vn = gfnum.vandermonde(params, xs, e + d + 1)
    # columns: E coefficients then N coefficients; rows: E(x_i) y_i - N(x_i) = 0
    mat = np.concatenate([gfnum.mul(params, ve, ys[:, None]), vn], axis=1)
    sol = gfnum.nullspace_vector(params, mat)
    if sol is None:
        return []
    epoly = UniPoly(sol[: e + 1], params)
    npoly = UniPoly(sol[e + 1:], params)
    if epoly.is_zero():
        return []
    q, r = npoly.divmod(epoly)
    if not r.is_zero() or q.degree > d:
        return []
    if _agreement(q, pairs, params) >= a:
        return [q]
    return []


def _interpolation_decode(pairs, d, a, params):
    """Bivariate interpolation with (1, d)-weighted degree a-1, then root
    finding; complete because any poly with agreement >= a > deg Q(X, g(X))
    forces Y - g(X) to divide Q."""
    dw = a - 1
    ell = dw // d
    cols = []  # (i, j) exponent pairs for X^i Y^j
    for j in range(ell + 1):
        for i in range(dw - j * d + 1):
            cols.append((i, j))
    xs = np.array([x for x, _ in pairs], dtype=np.int64)
    ys = np.array([y for _, y in pairs], dtype=np.int64)
    xpow = gfnum.vandermonde(params, xs, dw + 1)
    ypow = gfnum.vandermonde(params, ys, ell + 1)
    mat = np.stack([gfnum.mul(params, xpow[:, i], ypow[:, j]) for i, j in cols], axis=1)
    sol = gfnum.nullspace_vector(params, mat)
    if sol is None:
        return None
    q = np.zeros((dw + 1, ell + 1), dtype=np.int64)
    for (i, j), c in zip(cols, sol):
        q[i, j] = c
    roots = _roth_ruckenstein(q, d, params)
    out = []
    seen = set()
    for g in roots:
        key = tuple(int(c) for c in g.coeffs)
        if key not in seen and _agreement(g, pairs, params) >= a:
            seen.add(key)
            out.append(g)
    return out


def _rr_shift(q: np.ndarray, gamma: int, params: FieldParams) -> np.ndarray:
    """Coefficient matrix of Q(X, X*Y + gamma), X^s stripped."""
    nx, ny = q.shape
    out = np.zeros((nx + ny, ny), dtype=np.int64)
    gpow = [1]
    for _ in range(ny):
        gpow.append(params.mul(gpow[-1], gamma))
    for j2 in range(ny):
        col = q[:, j2]
        if not np.any(col):
            continue
        for j in range(j2 + 1):
            if (j2 & j) == j:  # binomial C(j2, j) mod 2, by Lucas
                out[j: j + nx, j] ^= gfnum.mul(params, col, gpow[j2 - j])
    # strip the common power of X
    rows = np.nonzero(np.any(out, axis=1))[0]
    if rows.size == 0:
        return out[:1]
    return out[int(rows[0]):]


def _roth_ruckenstein(q: np.ndarray, d: int, params: FieldParams,
                      node_cap: int = 50000) -> list[UniPoly]:
    """Candidate polynomial roots g (deg <= d) of a bivariate Q; may
    overcount, callers re-filter by agreement."""
    results = []
    budget = [node_cap]

    def strip(mat: np.ndarray) -> np.ndarray:
        rows = np.nonzero(np.any(mat, axis=1))[0]
        if rows.size == 0:
            return mat[:1]
        return mat[int(rows[0]):]

    def descend(mat: np.ndarray, level: int, prefix: list[int]):
        budget[0] -= 1
        if budget[0] < 0:
            raise RuntimeError("root-finding recursion budget exceeded")
        if level > d:
            # prefix is a root iff Q(X, prefix(X)) vanishes, i.e. the Y^0 column
            if not np.any(mat[:, 0]):
                results.append(UniPoly(prefix, params))
            return
        rpoly = UniPoly(mat[0], params)  # Q(0, Y); nonzero after stripping
        gammas = [v for v in range(params.order) if rpoly.eval_val(v) == 0]
        for gamma in gammas:
            descend(_rr_shift(mat, gamma, params), level + 1, prefix + [gamma])

    descend(strip(q), 0, [])
    return results


def brute_force_list_decode(pairs, d: int, a: int, params: FieldParams) -> list[UniPoly]:
    """Exhaustive decoder over all p^(d+1) coefficient vectors (test oracle)."""
    p = params.order
    n = p ** (d + 1)
    if n > 1 << 22:
        raise ValueError("field/degree too large for brute-force decoding")
    idx = np.arange(n)
    coeffs = np.empty((n, d + 1), dtype=np.int64)
    for j in range(d + 1):
        coeffs[:, j] = idx % p
        idx = idx // p
    xs = np.array([x for x, _ in pairs], dtype=np.int64)
    ys = np.array([y for _, y in pairs], dtype=np.int64)
    xpow = gfnum.vandermonde(params, xs, d + 1)  # b x (d+1)
    evals = gfnum.xor_reduce(
        gfnum.mul(params, coeffs[:, None, :], xpow[None, :, :]), axis=2)
    agree = np.count_nonzero(evals == ys[None, :], axis=1)
    out = []
    seen = set()
    for i in np.nonzero(agree >= a)[0]:
        g = UniPoly(coeffs[int(i)], params)
        key = tuple(int(c) for c in g.coeffs)
        if key not in seen:
            seen.add(key)
            out.append(g)
    return sorted(out, key=lambda g: tuple(int(c) for c in g.coeffs))


# ---------------------------------------------------------------------------
# Hadamard (inner product) list decoding
# ---------------------------------------------------------------------------

def hadamard_list_decode(h, gamma: float, ell: int) -> list[int]:
    """All z in {0,1}^ell with Pr_r[h(r) = <z,r>] >= 1/2 + gamma/2.

    `h` is a callable on r (as an int) or a precomputed length-2^ell bit
    array.  Exhaustive over all candidates and all r; meant for ell <= 24,
    and quadratic cost keeps it practical only well below that.
    """
    if ell > 24:
        raise ValueError("brute-force Hadamard decoding supports ell <= 24")
    n = 1 << ell
    if callable(h):
        hv = np.array([int(h(r)) & 1 for r in range(n)], dtype=np.uint64)
    else:
        hv = np.asarray(h, dtype=np.uint64)
    rs = np.arange(n, dtype=np.uint64)
    zs = np.arange(n, dtype=np.uint64)
    par = np.bitwise_count(zs[:, None] & rs[None, :]) & np.uint64(1)
    agree = np.count_nonzero(par == hv[None, :], axis=1)
    thresh = (0.5 + gamma / 2.0) * n - 1e-9
    return [int(z) for z in np.nonzero(agree >= thresh)[0]]


# ---------------------------------------------------------------------------
# polynomial self-correction
# ---------------------------------------------------------------------------

def decode_line(line_vals: Sequence[int], delta_bound: int, params: FieldParams) -> int | None:
    """Value at parameter 0 of the best degree-<=delta_bound explanation of
    a full line of p values; None when the list decoder comes back empty.

    Fast path: when the interpolant through the first delta+1 parameters
    matches the whole line it is the unique maximum-agreement candidate.
    """
    p = params.order
    line_arr = np.asarray(line_vals, dtype=np.int64)
    head = interpolate_vals(params, list(range(delta_bound + 1)),
                            [int(v) for v in line_arr[: delta_bound + 1]])
    if bool(np.all(head.eval_many(np.arange(p)) == line_arr)):
        return head.eval_val(0)
    pairs = list(enumerate(int(v) for v in line_arr))
    a = minimal_agreement(p, delta_bound)
    cands = sudan_list_decode(pairs, delta_bound, a, params)
    if not cands:
        return None
    best = max(cands, key=lambda q: _agreement(q, pairs, params))
    return best.eval_val(0)


def pcorr(g: PointOracle, params: FieldParams, m: int, delta_bound: int,
          x: Sequence[int], rng: np.random.Generator) -> int:
    """Self-correct a mildly corrupted degree-<=delta_bound polynomial at x.

    Restricts to a random line through x, queries all p points, and decodes
    the restriction with the list decoder, keeping the candidate with the
    highest agreement.  With corruption <= 1/4 and delta_bound < p/3 the
    answer is the true value with probability >= 2/3 per call.  If the
    promise is broken the return value is unspecified (the raw oracle value
    is the fallback).
    """
    p = params.order
    if 3 * delta_bound >= p:
        raise ValueError("self-correction requires degree bound < p/3")
    y = [int(v) for v in rng.integers(0, p, size=m)]
    while all(v == 0 for v in y):
        y = [int(v) for v in rng.integers(0, p, size=m)]
    line_vals = [int(g(tuple(int(x[j]) ^ params.mul(t, y[j]) for j in range(m))))
                 for t in range(p)]
    out = decode_line(line_vals, delta_bound, params)
    if out is None:
        return int(g(tuple(int(v) for v in x)))
    return out


def pcorr_majority(g: PointOracle, params: FieldParams, m: int, delta_bound: int,
                   x: Sequence[int], rng: np.random.Generator, votes: int) -> int:
    """Majority of `votes` independent self-correction calls (early exit once
    a value owns a strict majority)."""
    counts: dict[int, int] = {}
    need = votes // 2 + 1
    for i in range(votes):
        v = pcorr(g, params, m, delta_bound, x, rng)
        counts[v] = counts.get(v, 0) + 1
        if counts[v] >= need:
            return v
        if votes - i - 1 + max(counts.values()) < need:
            break
    return max(counts.items(), key=lambda kv: (kv[1], -kv[0]))[0]


def _lagrange_eval_matrix(params: FieldParams, delta_bound: int) -> np.ndarray:
    """L[t, n] = value at t of the n-th Lagrange basis poly on nodes
    0..delta_bound; cached per (field, degree)."""
    key = (params, delta_bound)
    if key not in _LAGRANGE_CACHE:
        p = params.order
        nodes = list(range(delta_bound + 1))
        cols = []
        for n in nodes:
            ys = [1 if t == n else 0 for t in nodes]
            cols.append(interpolate_vals(params, nodes, ys).eval_many(np.arange(p)))
        _LAGRANGE_CACHE[key] = np.stack(cols, axis=1)
    return _LAGRANGE_CACHE[key]


_LAGRANGE_CACHE: dict = {}


def pcorr_majority_table(table_vals, params: FieldParams, m: int, delta_bound: int,
                         rng: np.random.Generator, votes: int) -> np.ndarray:
    """Batched equivalent of pcorr_majority over every point of the domain.

    Per vote and per point it samples a line, gathers the p values from the
    table, and decodes them exactly like decode_line: the vectorized path
    handles lines fully explained by their leading interpolant (always the
    case on exact tables), everything else falls back to the scalar
    decoder.  Majority is taken per point across votes.
    """
    table = np.asarray(table_vals, dtype=np.int64)
    p = params.order
    n = p ** m
    if table.shape != (n,):
        raise ValueError("table length must be p^m")
    if 3 * delta_bound >= p:
        raise ValueError("self-correction requires degree bound < p/3")
    coords = np.empty((n, m), dtype=np.int64)
    idx = np.arange(n)
    for j in range(m):
        coords[:, j] = idx % p
        idx = idx // p
    weights = p ** np.arange(m)
    lag = _lagrange_eval_matrix(params, delta_bound)
    counts = np.zeros((n, p), dtype=np.int32)
    for _ in range(votes):
        ys = rng.integers(0, p, size=(n, m)).astype(np.int64)
        zero = ~np.any(ys, axis=1)
        while np.any(zero):
            ys[zero] = rng.integers(0, p, size=(int(zero.sum()), m))
            zero = ~np.any(ys, axis=1)
        lines = np.empty((n, p), dtype=np.int64)
        for t in range(p):
            pts = coords ^ gfnum.mul(params, t, ys)
            lines[:, t] = table[pts @ weights]
        pred = np.zeros((n, p), dtype=np.int64)
        for nn in range(delta_bound + 1):
            pred ^= gfnum.mul(params, lines[:, nn: nn + 1], lag[:, nn][None, :])
        exact = np.all(pred == lines, axis=1)
        vals = lines[:, 0].copy()
        for row in np.nonzero(~exact)[0]:
            out = decode_line(lines[int(row)].tolist(), delta_bound, params)
            vals[int(row)] = table[int(row)] if out is None else out
        counts[np.arange(n), vals] += 1
    return np.argmax(counts, axis=1).astype(np.int64)


# ---------------------------------------------------------------------------
# discrete-log self-correction
# ---------------------------------------------------------------------------

def dlcorr(g, params: FieldParams, m: int, epsilon: float, a_mat: MatrixFp,
           u, rng: np.random.Generator, trials: int | None = None) -> int | None:
    """Worst-case to average-case reduction for the matrix discrete log.

    `g` maps a nonzero vector v (value array) to a claimed exponent i with
    A^i * 1 = v; it only needs to succeed on an epsilon fraction of uniform
    inputs.  Returns an exponent ell with A^ell * 1 = u, or None when every
    sampled attempt fails.  A returned exponent is always verified, so a
    non-None answer is unconditionally correct.
    """
    mdim = a_mat.m
    u = np.asarray(u, dtype=np.int64)
    if not np.any(u):
        raise ValueError("discrete log of the zero vector is undefined")
    n = params.order ** mdim - 1
    ones = np.ones(mdim, dtype=np.int64)
    if trials is None:
        trials = max(1, math.ceil(2.0 / epsilon))
    for _ in range(trials):
        j = int(rng.integers(1, n + 1))
        v = mat_pow_vec(a_mat, j, u)
        i = g(v)
        if i is None or not 1 <= int(i) <= n:
            continue
        i = int(i)
        if not np.array_equal(mat_pow_vec(a_mat, i, ones), v):
            continue
        if i > j:
            ell = i - j
        elif i == j:
            ell = n
        else:
            ell = n - (j - i)
        if np.array_equal(mat_pow_vec(a_mat, ell, ones), u):
            return ell
    return None


# ---------------------------------------------------------------------------
# closeness test
# ---------------------------------------------------------------------------

def is_close(b_fn: PointOracle, delta: float, p_fn: PointOracle,
             rng: np.random.Generator, params: FieldParams, m: int) -> bool:
    """Accept iff b_fn agrees with p_fn on 3*log2(1/delta) random points.

    Perfect agreement always accepts; agreement <= 3/4 is rejected with
    probability at least 1 - delta.
    """
    if not 0 < delta <= 1:
        raise ValueError("delta must be in (0, 1]")
    samples = max(1, math.ceil(3 * math.log2(1 / delta)))
    p = params.order
    for _ in range(samples):
        pt = tuple(int(v) for v in rng.integers(0, p, size=m))
        if int(b_fn(pt)) != int(p_fn(pt)):
            return False
    return True
