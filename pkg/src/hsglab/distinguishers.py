"""Distinguisher oracles for experiments and tests.

A distinguisher is a callable int -> {0,1} over M-bit strings (ints in the
package bit convention).  Implementations here also expose `.batch(array)`
so the predictor machinery can query them vectorized.
"""

from __future__ import annotations

import numpy as np


class Distinguisher:
    """Vectorized wrapper around a boolean table over {0,1}^M."""

    def __init__(self, table: np.ndarray, m_bits: int, label: str = ""):
        self.table = np.asarray(table, dtype=np.int64)
        if self.table.shape != (1 << m_bits,):
            raise ValueError("table size must be 2^M")
        self.m_bits = m_bits
        self.label = label

    def __call__(self, y: int) -> int:
        return int(self.table[y])

    def batch(self, ys) -> np.ndarray:
        return self.table[np.asarray(ys, dtype=np.int64)]

    def acceptance_on_uniform(self) -> float:
        return float(self.table.mean())

    def acceptance_on(self, strings) -> float:
        return float(self.table[np.asarray(strings, dtype=np.int64)].mean())

    def avoids(self, strings, eps: float) -> bool:
        """eps-avoids: accepts >= eps of uniform and rejects every string."""
        return (self.acceptance_on_uniform() >= eps
                and not np.any(self.table[np.asarray(strings, dtype=np.int64)]))

    def advantage_against(self, strings) -> float:
        return abs(self.acceptance_on_uniform() - self.acceptance_on(strings))


def constant_distinguisher(m_bits: int, value: int) -> Distinguisher:
    table = np.full(1 << m_bits, 1 if value else 0, dtype=np.int64)
    return Distinguisher(table, m_bits, label=f"const{value}")


def random_distinguisher(m_bits: int, rng: np.random.Generator,
                         density: float = 0.5) -> Distinguisher:
    table = (rng.random(1 << m_bits) < density).astype(np.int64)
    return Distinguisher(table, m_bits, label="random")


def maximal_avoider(strings, m_bits: int) -> Distinguisher:
    """Accept exactly the strings outside the given family (the strongest
    avoider that exists for it)."""
    table = np.ones(1 << m_bits, dtype=np.int64)
    table[np.asarray(list(strings), dtype=np.int64)] = 0
    return Distinguisher(table, m_bits, label="maximal-avoider")


def frequency_distinguisher(strings, m_bits: int) -> Distinguisher:
    """Accept strings the family under-produces relative to uniform; this is
    the advantage-optimal distinguisher for the family (total variation)."""
    arr = np.asarray(list(strings), dtype=np.int64)
    n = 1 << m_bits
    freq = np.bincount(arr, minlength=n) / len(arr)
    table = (freq < 1.0 / n).astype(np.int64)
    return Distinguisher(table, m_bits, label="frequency")


def membership_distinguisher(accept_fn, m_bits: int, label: str = "membership") -> Distinguisher:
    table = np.array([1 if accept_fn(y) else 0 for y in range(1 << m_bits)],
                     dtype=np.int64)
    return Distinguisher(table, m_bits, label=label)
