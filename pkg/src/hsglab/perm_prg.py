"""The index permutation f_A, the hardcore-bit stream generator built from
it, and the distinguisher-driven inversion routine.

Bit strings of length s are stored as ints with the package-wide
little-endian convention (bit i of the int is character i+1 of the
string).  The permutation acts on {0,1}^s with s = m*log2(p):

    f_A(0) = 0,  f_A(i) = encoding of A^i * 1  for 1 <= i < p^m,

where the encoding of a vector is the concatenation of its coordinate
encodings, i.e. the point index.  For a generator matrix A this is a
bijection.

The generator emits, for every pair of seeds (x, r), the M bits
<x,r>, <f(x),r>, ..., <f^(M-1)(x),r>.  Inverting f on a target x with the
help of a distinguisher D walks the standard route: pick a position, build
a bit predictor from D with fresh random fill bits, decode the resulting
noisy Hadamard codeword, and forward-check every candidate.  A non-None
answer therefore always satisfies f(answer) = target.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .algebra import MatrixFp
from .decoding import hadamard_list_decode
from .field import FieldParams
from .genmatrix import GenMatrix


def parity(v: int) -> int:
    return v.bit_count() & 1


class IndexPermutation:
    """f_A on {0,1}^s, with a lazily built forward table and a test-only
    inverse table."""

    def __init__(self, gen: GenMatrix | MatrixFp, params: FieldParams, m: int):
        self.matrix = gen.matrix if isinstance(gen, GenMatrix) else gen
        self.params = params
        self.m = m
        self.s = m * params.k
        self.size = 1 << self.s
        self._forward: np.ndarray | None = None
        self._inverse: np.ndarray | None = None

    def encode_vec(self, vec) -> int:
        out = 0
        for j, c in enumerate(vec):
            out |= int(c) << (j * self.params.k)
        return out

    def decode_vec(self, x: int) -> np.ndarray:
        mask = self.params.order - 1
        return np.array([(x >> (j * self.params.k)) & mask for j in range(self.m)],
                        dtype=np.int64)

    def forward_table(self) -> np.ndarray:
        if self._forward is None:
            table = np.zeros(self.size, dtype=np.int64)
            w = np.ones(self.m, dtype=np.int64)
            for i in range(1, self.size):
                w = self.matrix.vec(w)
                table[i] = self.encode_vec(w)
            self._forward = table
        return self._forward

    def __call__(self, x: int) -> int:
        return int(self.forward_table()[x])

    def inverse_table(self) -> np.ndarray:
        """Test-only: full inverse of the forward table."""
        if self._inverse is None:
            fwd = self.forward_table()
            inv = np.zeros(self.size, dtype=np.int64)
            inv[fwd] = np.arange(self.size)
            self._inverse = inv
        return self._inverse

    def is_bijection(self) -> bool:
        return len(set(self.forward_table().tolist())) == self.size


def f_apply(perm: IndexPermutation, x: int) -> int:
    """One application of the permutation; x and the result are s-bit ints."""
    if not 0 <= x < perm.size:
        raise ValueError("input outside {0,1}^s")
    return perm(x)


class PrgOutput:
    """The indexed family of 2^(2s) M-bit strings; entry (x, r) holds the
    inner products of r with the forward orbit of x."""

    def __init__(self, perm: IndexPermutation, m_bits: int):
        self.perm = perm
        self.m_bits = m_bits
        self.s = perm.s
        self.count = 1 << (2 * perm.s)

    def entry(self, x: int, r: int) -> int:
        out = 0
        w = x
        for k in range(self.m_bits):
            out |= parity(w & r) << k
            w = self.perm(w)
        return out

    def __getitem__(self, idx: int) -> int:
        if not 0 <= idx < self.count:
            raise IndexError(idx)
        return self.entry(idx >> self.s, idx & (self.perm.size - 1))

    def __len__(self):
        return self.count

    def materialize(self) -> np.ndarray:
        """All entries as an int array indexed by x*2^s + r; s <= 12 only."""
        if self.s > 12:
            raise ValueError("full enumeration is capped at s <= 12")
        n = self.perm.size
        fwd = self.perm.forward_table()
        chain = np.arange(n)
        rs = np.arange(n, dtype=np.uint64)
        out = np.zeros((n, n), dtype=np.int64)
        for k in range(self.m_bits):
            bits = np.bitwise_count(chain.astype(np.uint64)[:, None] & rs[None, :]) & np.uint64(1)
            out |= bits.astype(np.int64) << k
            chain = fwd[chain]
        return out.reshape(-1)


def crypto_g(perm: IndexPermutation, m_bits: int) -> PrgOutput:
    """The full 2^(2s)-string family for the given permutation."""
    return PrgOutput(perm, m_bits)


def invert(f_oracle: Callable[[int], int], s: int, m_bits: int,
           d_oracle: Callable[[int], int], x: int, rng: np.random.Generator,
           reps: int | None = None, gamma: float | None = None) -> int | None:
    """Invert the permutation on x using a distinguisher for the generator.

    f_oracle is forward-only.  Each repetition samples a position i in
    [1, M], predicts the string bit at that position from the forward-
    computable suffix (positions above i) with random fill below, decodes
    the prediction table as a noisy Hadamard codeword in both orientations,
    and forward-checks each candidate preimage.  Returns the first
    candidate passing f(z) = x, or None.
    """
    if reps is None:
        reps = 4 * m_bits * m_bits
    if gamma is None:
        gamma = 1.0 / (2 * m_bits * m_bits)
    n = 1 << s
    # suffix chain: position k >= 2 of the string for seed z with f(z)=x is
    # <f^(k-2)(x), r>
    chain = [x]
    for _ in range(m_bits - 2):
        chain.append(f_oracle(chain[-1]))
    for _ in range(reps):
        i = int(rng.integers(1, m_bits + 1))
        h = np.zeros(n, dtype=np.uint8)
        for r in range(n):
            known = 0
            for k in range(i + 1, m_bits + 1):
                known |= parity(chain[k - 2] & r) << (k - 1)
            fill = 0
            if i > 1:
                fill = int(rng.integers(0, 1 << (i - 1)))
            s0 = fill | known            # bit i set to 0
            s1 = fill | known | (1 << (i - 1))
            d0, d1 = int(d_oracle(s0)), int(d_oracle(s1))
            if d0 == d1:
                h[r] = int(rng.integers(0, 2))
            else:
                h[r] = 0 if d0 == 0 else 1  # rejected string looks generated
        for hv in (h, 1 - h):
            for z in hadamard_list_decode(hv, gamma, s):
                if f_oracle(z) == x:
                    return z
    return None
