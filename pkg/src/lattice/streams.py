"""
Deterministic per-block random streams.

Every random draw in the package comes from a generator derived from a
``StreamKey``. Keys are hashed into a ``SeedSequence`` spawn key and fed to a
counter-based Philox bit generator, so streams are independent of each other
and of the order or thread in which they are created.
"""

from dataclasses import dataclass, replace
from enum import IntEnum
from typing import Sequence, Tuple

import numpy as np

_SEED_MASK = (1 << 64) - 1


class Purpose(IntEnum):
    """Randomness source tags (values are part of the stream derivation)."""

    ENV = 1
    DRIVER = 2
    RESAMPLE_ENV = 3
    RESAMPLE_DRIVER = 4
    ALG = 5


def zigzag(value: int) -> int:
    """Map a signed integer to a unique nonnegative one."""
    value = int(value)
    return 2 * value if value >= 0 else -2 * value - 1


@dataclass(frozen=True)
class StreamKey:
    """
    Identity of one random stream.

    Attributes:
        master_seed: 64-bit master seed of the run
        block: Block id (any dimension)
        purpose: Randomness source
        replicate: Replicate index j of RESAMPLE purposes (0 for base streams)
        trial: Monte Carlo trial index
        slab: Unit slab of the coupling coordinate for driver marks
    """

    master_seed: int
    block: Tuple[int, ...]
    purpose: Purpose
    replicate: int = 0
    trial: int = 0
    slab: int = 0

    def spawn_key(self) -> Tuple[int, ...]:
        return (
            int(self.purpose),
            int(self.replicate),
            int(self.trial),
            int(self.slab),
            len(self.block),
            *(zigzag(c) for c in self.block),
        )

    def with_slab(self, slab: int) -> "StreamKey":
        return replace(self, slab=slab)


def derive_stream(key: StreamKey) -> np.random.Generator:
    """
    Create the generator for a stream key.

    Args:
        key: Stream identity

    Returns:
        A fresh ``numpy.random.Generator``; identical keys give identical streams
    """
    seq = np.random.SeedSequence(
        entropy=int(key.master_seed) & _SEED_MASK,
        spawn_key=key.spawn_key(),
    )
    return np.random.Generator(np.random.Philox(seq))


def block_stream(
    master_seed: int,
    block: Sequence[int],
    purpose: Purpose,
    trial: int = 0,
    replicate: int = 0,
    slab: int = 0,
) -> np.random.Generator:
    """Shorthand for ``derive_stream(StreamKey(...))``."""
    return derive_stream(
        StreamKey(
            master_seed=master_seed,
            block=tuple(int(c) for c in block),
            purpose=purpose,
            replicate=replicate,
            trial=trial,
            slab=slab,
        )
    )
