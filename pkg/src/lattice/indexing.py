"""
Block and site indexing on the coarse lattice Z^d and the fine lattice bZ^d.

Sites are stored by their integer index ``k`` (the site itself is ``x = b k``).
A site owns the cube ``Q(x; b, M) = M x + [0, M b)^d``; a block ``z`` owns the
sites ``I_b(z)`` and covers the region ``M z + [0, M)^d``.
"""

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from .params import ValidatedParams

BlockId = Tuple[int, ...]
SiteId = Tuple[int, ...]

# Offsets (lo, hi) of each neighborhood kind, in blocks, half-open
_NEIGHBORHOOD_SPANS = {
    "I_plus": (-1, 2),
    "I_plus_plus": (-2, 3),
    "Ib": (0, 1),
    "Ib_plus": (-1, 2),
    "Ib_plus_plus": (-2, 3),
}


class Neighborhood(str, Enum):
    I_PLUS = "I_plus"
    I_PLUS_PLUS = "I_plus_plus"
    IB = "Ib"
    IB_PLUS = "Ib_plus"
    IB_PLUS_PLUS = "Ib_plus_plus"

    @property
    def is_site_set(self) -> bool:
        return self.value.startswith("Ib")


def index_neighbors(kind, z: Sequence[int], p: ValidatedParams) -> List[Tuple[int, ...]]:
    """
    Enumerate a block or site neighborhood of block ``z``.

    Block kinds return block ids ``z + {-1,0,1}^d`` / ``z + {0,±1,±2}^d``; site
    kinds return site indices ``k`` with ``b k`` in ``z + [lo, hi)^d``. Output is
    in lexicographic order. Works in any dimension.

    Args:
        kind: Neighborhood kind (enum or its string value)
        z: Block id
        p: Validated parameters (for ``b``)

    Returns:
        List of integer tuples
    """
    kind = Neighborhood(kind)
    lo, hi = _NEIGHBORHOOD_SPANS[kind.value]
    z = tuple(int(c) for c in z)
    if kind.is_site_set:
        n = p.inv_b
        ranges = [range(n * (c + lo), n * (c + hi)) for c in z]
    else:
        ranges = [range(c + lo, c + hi) for c in z]
    return [tuple(k) for k in itertools.product(*ranges)]


def block_of_site(k: Sequence[int], p: ValidatedParams) -> BlockId:
    """Block ``z`` with ``b k`` in ``z + [0, 1)^d``."""
    return tuple(int(c) // p.inv_b for c in k)


def local_site_index(k: Sequence[int], p: ValidatedParams) -> int:
    """Row-major position of site ``k`` inside its block."""
    n = p.inv_b
    idx = 0
    for c in k:
        idx = idx * n + (int(c) % n)
    return idx


def site_of_local(z: Sequence[int], local: int, p: ValidatedParams) -> SiteId:
    """Inverse of ``local_site_index`` for block ``z``."""
    n = p.inv_b
    digits = []
    for _ in range(len(z)):
        digits.append(local % n)
        local //= n
    digits.reverse()
    return tuple(n * int(c) + d for c, d in zip(z, digits))


def local_sites_array(p: ValidatedParams) -> np.ndarray:
    """Offsets ``(i, j)`` of the local sites of a planar block, row-major."""
    n = p.inv_b
    i, j = np.divmod(np.arange(n * n), n)
    return np.stack([i, j], axis=1)


def site_cube(k: Sequence[int], p: ValidatedParams) -> Tuple[float, float, float, float]:
    """Planar cube ``(x0, y0, x1, y1)`` of site ``k``."""
    s = p.cube_side
    x0 = int(k[0]) * p.M / p.inv_b
    y0 = int(k[1]) * p.M / p.inv_b
    return (x0, y0, x0 + s, y0 + s)


def block_box(z: Sequence[int], p: ValidatedParams) -> Tuple[float, float, float, float]:
    """Planar region ``(x0, y0, x1, y1)`` of block ``z``."""
    return (z[0] * p.M, z[1] * p.M, (z[0] + 1) * p.M, (z[1] + 1) * p.M)


def sup_norm(z: Sequence[int]) -> int:
    return max(abs(int(c)) for c in z)


@dataclass(frozen=True)
class BlockWindow:
    """
    Rectangular range of blocks ``lo <= z < hi`` (componentwise).
    """

    lo: Tuple[int, int]
    hi: Tuple[int, int]

    def __post_init__(self):
        if any(h <= l for l, h in zip(self.lo, self.hi)):
            raise ValueError(f"Empty block window {self.lo}..{self.hi}")

    @classmethod
    def centered(cls, n: int) -> "BlockWindow":
        """Blocks ``[-n, n-1]^2``, covering ``[-M n, M n)^2``."""
        return cls((-n, -n), (n, n))

    @classmethod
    def around(cls, z: Sequence[int], radius: int) -> "BlockWindow":
        return cls(
            (int(z[0]) - radius, int(z[1]) - radius),
            (int(z[0]) + radius + 1, int(z[1]) + radius + 1),
        )

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.hi[0] - self.lo[0], self.hi[1] - self.lo[1])

    def __len__(self) -> int:
        nx, ny = self.shape
        return nx * ny

    def __iter__(self) -> Iterator[BlockId]:
        for zx in range(self.lo[0], self.hi[0]):
            for zy in range(self.lo[1], self.hi[1]):
                yield (zx, zy)

    def contains(self, z: Sequence[int]) -> bool:
        return all(l <= int(c) < h for c, l, h in zip(z, self.lo, self.hi))

    def contains_window(self, other: "BlockWindow") -> bool:
        return all(so <= oo and oh <= sh for so, oo, oh, sh in zip(self.lo, other.lo, other.hi, self.hi))

    def expand(self, k: int) -> "BlockWindow":
        return BlockWindow(
            (self.lo[0] - k, self.lo[1] - k),
            (self.hi[0] + k, self.hi[1] + k),
        )

    def intersect(self, other: "BlockWindow") -> "BlockWindow":
        lo = (max(self.lo[0], other.lo[0]), max(self.lo[1], other.lo[1]))
        hi = (min(self.hi[0], other.hi[0]), min(self.hi[1], other.hi[1]))
        return BlockWindow(lo, hi)

    def overlaps(self, other: "BlockWindow") -> bool:
        return all(max(a, c) < min(b, d) for a, b, c, d in zip(self.lo, self.hi, other.lo, other.hi))

    def shift(self, z0: Sequence[int]) -> "BlockWindow":
        return BlockWindow(
            (self.lo[0] + int(z0[0]), self.lo[1] + int(z0[1])),
            (self.hi[0] + int(z0[0]), self.hi[1] + int(z0[1])),
        )

    def box(self, p: ValidatedParams) -> Tuple[float, float, float, float]:
        return (self.lo[0] * p.M, self.lo[1] * p.M, self.hi[0] * p.M, self.hi[1] * p.M)

    def site_range(self, p: ValidatedParams) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        """Half-open range of site indices covered by the window."""
        n = p.inv_b
        return (
            (self.lo[0] * n, self.lo[1] * n),
            (self.hi[0] * n, self.hi[1] * n),
        )

    def to_dict(self) -> dict:
        return {"lo": list(self.lo), "hi": list(self.hi)}
