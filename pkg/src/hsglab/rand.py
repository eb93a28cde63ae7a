"""Deterministic randomness streams.

One global 64-bit seed expands into any number of named streams: the
stream identity is the label tuple (ints and strings), folded together
with the seed into a SeedSequence that keys a counter-based Philox
generator.  The same (seed, label) always yields the same stream, so every
measured rate in a report can be replayed exactly; distinct labels give
statistically independent streams.
"""

from __future__ import annotations

import zlib

import numpy as np

_MASK = (1 << 64) - 1


def _fold(label) -> list[int]:
    if not isinstance(label, (tuple, list)):
        label = (label,)
    out = []
    for item in label:
        if isinstance(item, (int, np.integer)):
            out.append(int(item) & _MASK)
        elif isinstance(item, str):
            out.append(zlib.crc32(item.encode()))
        else:
            raise TypeError(f"stream labels must be ints or strings, got {type(item)}")
    return out


def child_rng(seed: int, label) -> np.random.Generator:
    """The named stream derived from (seed, label)."""
    entropy = [int(seed) & _MASK] + _fold(label)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def trial_rng(seed: int, experiment: str, trial: int) -> np.random.Generator:
    """Per-trial stream: fan-out across workers stays reproducible because
    each trial owns its label."""
    return child_rng(seed, (experiment, trial))
