"""Counter-based uniform random streams for reproducible parallel sampling.

Every trial draws from a Philox stream addressed by ``(seed, lane, index)``,
so the value of trial ``i`` never depends on how many trials ran before it or
on how a batch was split across workers.  ``lane`` separates independent
decision streams within one trial family (e.g. the final outcome draw versus
per-stage absorption draws).
"""

from __future__ import annotations

import numpy as np
from numpy.random import Generator, Philox

# Philox-4x64 emits four 64-bit words per counter increment and Generator
# consumes exactly one word per float64, so trial i lives at counter i // 4,
# word i % 4.  Slices of the stream are therefore chunk-invariant.
_WORDS_PER_BLOCK = 4


def _generator(seed: int, lane: int, block: int) -> Generator:
    key = np.array([np.uint64(seed), np.uint64(lane)], dtype=np.uint64)
    counter = np.array([block, 0, 0, 0], dtype=np.uint64)  # counter[0] is the low word
    return Generator(Philox(counter=counter, key=key))


def uniforms(seed: int, lane: int, start: int, count: int) -> np.ndarray:
    """Uniform [0, 1) values for trial indices ``start .. start+count-1``.

    Concatenating adjacent slices reproduces the whole stream bit for bit.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    if count == 0:
        return np.empty(0, dtype=np.float64)
    block, offset = divmod(start, _WORDS_PER_BLOCK)
    vals = _generator(seed, lane, block).random(offset + count)
    return vals[offset:]


def uniform(seed: int, lane: int, index: int) -> float:
    """The single uniform value for one trial index."""
    return float(uniforms(seed, lane, index, 1)[0])
