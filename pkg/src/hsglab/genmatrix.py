"""Generator matrices for F_p^m and deterministic candidate sets.

A generator matrix A satisfies {A^i * 1 : 1 <= i < p^m} = F_p^m \\ {0};
it is the matrix form of a primitive element of F_(p^m).  Candidate sets
are built deterministically and verified by orbit enumeration, which is
affordable at this package's scale (p^m <= 2^20) even though a candidate
set is useful precisely because primitivity is expensive to certify in
general.

Two construction routes:

* tower: p = 2^(2*3^a) with the tower modulus and m = 3^b.  Then F_(p^m)
  is the tower field of degree k*m, multiplication by a fixed element g is
  F_p-linear in the basis (1, x, ..., x^(m-1)), and the matrix of that map
  is a generator matrix whenever g is primitive.  Candidates enumerate
  g = x, x+1, ... in element order.
* companion: for other (p, m), candidates are companion matrices of monic
  degree-m polynomials over F_p in coefficient order.  This keeps small
  non-tower test fields usable; the verified-set contract is identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .algebra import MatrixFp
from .field import FieldElem, FieldParams, gf, is_tower_degree


def _is_power_of_3(m: int) -> bool:
    while m % 3 == 0:
        m //= 3
    return m == 1


@dataclass(frozen=True)
class GenMatrix:
    """A candidate generator matrix plus its verification status."""

    matrix: MatrixFp
    verified: bool

    @property
    def params(self) -> FieldParams:
        return self.matrix.params

    @property
    def m(self) -> int:
        return self.matrix.m


@dataclass
class CandidateSet:
    """Deterministic list of matrices containing >= 1 verified generator."""

    matrices: list[MatrixFp]
    params: FieldParams
    m: int
    verified_index: int
    route: str = "tower"

    def __iter__(self):
        return iter(self.matrices)

    def __len__(self):
        return len(self.matrices)

    def first_generator(self) -> GenMatrix:
        return GenMatrix(self.matrices[self.verified_index], True)


def big_field_for(params: FieldParams, m: int) -> FieldParams:
    """The tower representation of F_(p^m) used by the coordinate map."""
    if not params.nice:
        raise ValueError("tower construction needs a tower-modulus base field")
    if not _is_power_of_3(m):
        raise ValueError("tower construction needs m to be a power of 3")
    return gf(params.k * m)


def field_to_coords(big: FieldParams, params: FieldParams, m: int, val: int) -> np.ndarray:
    """Coordinates of a big-field element in the basis (1, x, ..., x^(m-1))
    over F_p; bit i*m + j of the element is bit i of coordinate j."""
    out = np.zeros(m, dtype=np.int64)
    for t in range(big.k):
        if val >> t & 1:
            out[t % m] |= 1 << (t // m)
    return out


def coords_to_field(big: FieldParams, params: FieldParams, m: int, coords) -> int:
    val = 0
    for j, c in enumerate(coords):
        c = int(c)
        for i in range(params.k):
            if c >> i & 1:
                val |= 1 << (i * m + j)
    return val


def mult_to_matrix(g: FieldElem, params: FieldParams, m: int) -> MatrixFp:
    """Matrix of multiplication-by-g on F_(p^m) viewed as F_p^m.

    g lives in the tower field of degree k*m.  Requires a tower base field
    and m a power of 3 (the regime where the coordinate map is F_p-linear);
    m = 1 is the trivial case [g] for any base field.
    """
    if m == 1:
        if g.params != params:
            raise ValueError("for m = 1 the element must live in the base field")
        return MatrixFp([[g.val]], params)
    big = big_field_for(params, m)
    if g.params != big:
        raise ValueError("element does not live in the expected tower field")
    cols = []
    basis = 1  # x^j as a big-field value
    for _ in range(m):
        cols.append(field_to_coords(big, params, m, big.mul(g.val, basis)))
        basis <<= 1
    return MatrixFp(np.stack(cols, axis=1), params)


ORBIT_CAP = 1 << 20


def is_generator_matrix(a_mat: MatrixFp) -> bool:
    """Orbit check: A is a generator matrix iff the walk A^i * 1 visits
    p^m - 1 distinct nonzero vectors (which then forces A^(p^m-1) = I)."""
    params = a_mat.params
    m = a_mat.m
    total = params.order ** m
    if total > ORBIT_CAP:
        raise ValueError("orbit enumeration only supported for p^m <= 2^20")
    seen = set()
    w = np.ones(m, dtype=np.int64)
    for _ in range(total - 1):
        w = a_mat.vec(w)
        key = tuple(int(v) for v in w)
        if not any(key) or key in seen:
            return False
        seen.add(key)
    return True


def _tower_candidates(params: FieldParams, m: int, cap: int):
    big = params if m == 1 else big_field_for(params, m)
    for val in range(2, 2 + cap):
        if val >= big.order:
            return
        yield mult_to_matrix(FieldElem(val, big), params, m)


def _companion_candidates(params: FieldParams, m: int, cap: int):
    p = params.order
    for idx in range(p ** m):
        if idx >= cap * p:  # generous scan; primitive polys are not rare
            return
        coeffs = []
        t = idx
        for _ in range(m):
            coeffs.append(t % p)
            t //= p
        mat = np.zeros((m, m), dtype=np.int64)
        for r in range(1, m):
            mat[r, r - 1] = 1
        for r in range(m):
            mat[r, m - 1] = coeffs[r]  # char 2: -c == c
        yield MatrixFp(mat, params)


def build_candidate_set(params: FieldParams, m: int, cap: int | None = None) -> CandidateSet:
    """Deterministic candidate matrices with a verified generator among them.

    Enumeration stops at the first verified generator matrix; if the cap is
    exhausted first, construction fails loudly rather than guessing.
    """
    if params.order ** m > ORBIT_CAP:
        raise ValueError("candidate verification needs p^m <= 2^20")
    if cap is None:
        cap = max(8, 4 * m * params.k)
    if m == 1 or (params.nice and _is_power_of_3(m)):
        route = "tower"
        gen = _tower_candidates(params, m, cap)
    else:
        route = "companion"
        gen = _companion_candidates(params, m, cap)
    matrices = []
    for cand in gen:
        matrices.append(cand)
        if is_generator_matrix(cand):
            return CandidateSet(matrices, params, m, len(matrices) - 1, route)
        if len(matrices) >= cap:
            break
    raise RuntimeError(
        f"no generator matrix among the first {len(matrices)} candidates for "
        f"p=2^{params.k}, m={m}")
