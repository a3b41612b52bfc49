"""
Environment construction.

The environment of a window is built from the iid seed field ``{Y_z}`` on the
window padded by ``pad_blocks``: the seeds (plus the grid ``L Z^2`` for the
grid variants) are triangulated, the Delaunay edges are clipped into the site
cubes, and every block gets its ``BlockSites`` record. When the dependency
range is finite, blocks are rebuilt from a local triangulation; the result is
bit-identical to a full rebuild.
"""

import hashlib
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..geometry import (
    Box,
    Triangulation,
    clip_edges_to_grid,
    delaunay_triangulate,
    sample_poisson_block,
    segmented_cumsum,
    superimpose_grid,
)
from ..lattice import (
    BlockId,
    BlockWindow,
    Purpose,
    ValidatedParams,
    Variant,
    block_box,
    block_of_site,
    block_stream,
    local_site_index,
    local_sites_array,
)
from ..utils import get_config, get_logger
from ..utils.errors import OutOfWindowError
from .sites import BlockSites, EnvironmentSite
from .width import edges_near_box, segment_box_distance, width_block_masses

logger = get_logger(__name__)

YField = Dict[BlockId, np.ndarray]


def sample_y_block(
    p: ValidatedParams,
    z: Sequence[int],
    seed: int,
    trial: int = 0,
    purpose: Purpose = Purpose.ENV,
    replicate: int = 0,
) -> np.ndarray:
    """Seed points ``Y_z``: Poisson(``lambda_del``) points in the block region."""
    rng = block_stream(seed, z, purpose, trial=trial, replicate=replicate)
    return sample_poisson_block(rng, p.lambda_del, Box.from_tuple(block_box(z, p)))


def sample_y_field(
    p: ValidatedParams, y_window: BlockWindow, seed: int, trial: int = 0, replicate: int = 0
) -> YField:
    return {z: sample_y_block(p, z, seed, trial, replicate=replicate) for z in y_window}


def _bounding_window(blocks: Iterable[BlockId]) -> BlockWindow:
    blocks = list(blocks)
    xs = [z[0] for z in blocks]
    ys = [z[1] for z in blocks]
    return BlockWindow((min(xs), min(ys)), (max(xs) + 1, max(ys) + 1))


def _box_intersect(a: Box, b: Box) -> Box:
    return Box(max(a.x0, b.x0), max(a.y0, b.y0), min(a.x1, b.x1), min(a.y1, b.y1))


def street_triangulation(
    p: ValidatedParams, y_blocks: Mapping[BlockId, np.ndarray], source: BlockWindow, grid_box: Box
) -> Triangulation:
    """
    Triangulate the seeds of the source blocks, with the grid on ``grid_box``
    for the grid variants.

    Raises:
        DegenerateInputError: Too few or collinear seeds (pure Delaunay only)
    """
    chunks = [y_blocks[z] for z in source if z in y_blocks]
    pts = np.vstack(chunks) if chunks else np.empty((0, 2))
    if p.variant.uses_grid:
        pts = superimpose_grid(pts, p.L, grid_box)
    return delaunay_triangulate(pts, frame=p.variant.uses_grid)


def cube_boxes(z: Sequence[int], p: ValidatedParams) -> np.ndarray:
    """``(S, 4)`` cube boxes of the sites of block ``z`` in local order."""
    n = p.inv_b
    k = local_sites_array(p) + np.array([z[0] * n, z[1] * n])
    x0 = k * p.M / n
    x1 = (k + 1) * p.M / n
    return np.column_stack([x0[:, 0], x0[:, 1], x1[:, 0], x1[:, 1]])


def block_sites_from_edges(
    p: ValidatedParams, edges: np.ndarray, targets: Sequence[BlockId]
) -> Dict[BlockId, BlockSites]:
    """
    Build the ``BlockSites`` of the target blocks from a street edge set.

    Every record depends only on the edges meeting (or, for WIDTH, within
    ``w0`` of) its block.
    """
    targets = [tuple(int(c) for c in z) for z in targets]
    if not targets:
        return {}
    n = p.inv_b
    S = n * n
    out: Dict[BlockId, BlockSites] = {}

    if not p.variant.has_segments:
        empty_offsets = np.zeros(S + 1, dtype=np.int64)
        for z in targets:
            near = edges_near_box(edges, Box.from_tuple(block_box(z, p)), p.w0)
            out[z] = BlockSites(
                block=z,
                total=np.zeros(S),
                mass=None,
                offsets=empty_offsets,
                segments=np.empty((0, 4)),
                lengths=np.empty(0),
                cum=np.empty(0),
                width_edges=near,
            )
        return out

    bounds = _bounding_window(targets)
    site_lo, site_hi = bounds.site_range(p)
    pieces = clip_edges_to_grid(edges, p.M, n, site_lo, site_hi)
    blk = np.floor_divide(pieces.sites, n)
    local = np.mod(pieces.sites[:, 0], n) * n + np.mod(pieces.sites[:, 1], n)
    segs = pieces.segments
    order = np.lexsort((segs[:, 3], segs[:, 2], segs[:, 1], segs[:, 0], local, blk[:, 1], blk[:, 0]))
    blk, local, segs, lengths = blk[order], local[order], segs[order], pieces.lengths[order]

    groups: Dict[BlockId, Tuple[int, int]] = {}
    if blk.shape[0]:
        keys, starts, counts = np.unique(blk, axis=0, return_index=True, return_counts=True)
        groups = {(int(k[0]), int(k[1])): (int(s), int(c)) for k, s, c in zip(keys, starts, counts)}

    for z in targets:
        start, count = groups.get(z, (0, 0))
        sl = slice(start, start + count)
        loc = local[sl]
        sizes = np.bincount(loc, minlength=S).astype(np.int64)
        offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        cum = segmented_cumsum(lengths[sl], offsets[:-1], sizes)
        total = np.zeros(S)
        nonempty = sizes > 0
        total[nonempty] = cum[offsets[1:][nonempty] - 1]
        mass = np.minimum(total, p.rho) if p.variant is Variant.CAPPED else total.copy()
        out[z] = BlockSites(
            block=z,
            total=total,
            mass=mass,
            offsets=offsets,
            segments=segs[sl].copy(),
            lengths=lengths[sl].copy(),
            cum=cum,
        )
    return out


class Environment:
    """
    Random environment on a block window.

    Holds the seed field on the padded window (``y_window``) and one
    ``BlockSites`` record per block of ``window``. Instances are never mutated
    after construction apart from the WIDTH mass cache; modified copies come
    from ``with_y_block`` and ``rebuild_blocks``.
    """

    def __init__(
        self,
        params: ValidatedParams,
        window: BlockWindow,
        y_window: BlockWindow,
        y_blocks: Mapping[BlockId, np.ndarray],
        blocks: Mapping[BlockId, BlockSites],
        seed: int = 0,
        trial: int = 0,
        width_quadrature: Optional[int] = None,
    ):
        self.params = params
        self.window = window
        self.y_window = y_window
        self.y_blocks: Dict[BlockId, np.ndarray] = dict(y_blocks)
        self.blocks: Dict[BlockId, BlockSites] = dict(blocks)
        self.seed = int(seed)
        self.trial = int(trial)
        if width_quadrature is None:
            width_quadrature = int(get_config().get_environment_config().get("width_quadrature", 256))
        self.width_quadrature = width_quadrature
        self._width_cache: Dict[BlockId, np.ndarray] = {}
        self._width_error = 0.0

    def __repr__(self) -> str:
        return (
            f"Environment(variant={self.params.variant.value}, window={self.window.lo}..{self.window.hi}, "
            f"seed={self.seed}, trial={self.trial})"
        )

    def block(self, z: Sequence[int]) -> BlockSites:
        z = (int(z[0]), int(z[1]))
        if z not in self.blocks:
            raise OutOfWindowError(f"Block {z} is outside the environment window")
        return self.blocks[z]

    def block_mass(self, z: Sequence[int]) -> np.ndarray:
        """Masses of the sites of block ``z`` in local order."""
        data = self.block(z)
        if data.mass is not None:
            return data.mass
        key = data.block
        if key not in self._width_cache:
            masses, err = width_block_masses(
                cube_boxes(key, self.params), data.width_edges, self.params.w0, self.width_quadrature
            )
            self._width_cache[key] = masses
            self._width_error = max(self._width_error, err)
        return self._width_cache[key]

    def nonempty_mask(self, z: Sequence[int]) -> np.ndarray:
        """
        Sites of block ``z`` with positive mass, in local order.

        For WIDTH this is decided exactly (some edge closer than ``w0`` to the
        cube) instead of from the quadrature.
        """
        data = self.block(z)
        if data.mass is not None:
            return data.mass > 0
        edges = data.width_edges
        out = np.zeros(data.n_sites, dtype=bool)
        if edges.shape[0] == 0:
            return out
        for s, row in enumerate(cube_boxes(data.block, self.params)):
            box = Box.from_tuple(row)
            out[s] = any(segment_box_distance(e, box) < self.params.w0 for e in edges)
        return out

    @property
    def width_error_bound(self) -> float:
        """Largest quadrature error bound among the WIDTH masses computed so far."""
        return self._width_error

    def site(self, k: Sequence[int]) -> EnvironmentSite:
        """Environment entry of site ``k``."""
        k = (int(k[0]), int(k[1]))
        z = block_of_site(k, self.params)
        data = self.block(z)
        local = local_site_index(k, self.params)
        sl = data.site_slice(local)
        return EnvironmentSite(
            site=k,
            variant=self.params.variant,
            mass=float(self.block_mass(z)[local]),
            total=float(data.total[local]),
            segments=data.segments[sl],
            lengths=data.lengths[sl],
            cum=data.cum[sl],
            width_edges=data.width_edges,
        )

    def mass_grid(self, window: Optional[BlockWindow] = None) -> np.ndarray:
        """
        Site masses of a block window as a 2-d array indexed by
        ``k - window.site_range()[0]``.
        """
        window = self.window if window is None else window
        n = self.params.inv_b
        nx, ny = window.shape
        grid = np.zeros((nx * n, ny * n))
        for z in window:
            i = (z[0] - window.lo[0]) * n
            j = (z[1] - window.lo[1]) * n
            grid[i:i + n, j:j + n] = self.block_mass(z).reshape(n, n)
        return grid

    def digest(self) -> str:
        """SHA-256 of the seed field, for provenance records."""
        h = hashlib.sha256()
        for z in sorted(self.y_blocks):
            h.update(np.asarray(z, dtype=np.int64).tobytes())
            h.update(np.ascontiguousarray(self.y_blocks[z]).tobytes())
        return h.hexdigest()

    def triangulation(self) -> Triangulation:
        """Street triangulation of the full padded window."""
        box = Box.from_tuple(self.y_window.box(self.params))
        return street_triangulation(self.params, self.y_blocks, self.y_window, box)

    def with_y_block(self, z: Sequence[int], points: np.ndarray) -> "Environment":
        """
        Copy with ``Y_z`` replaced and every affected block rebuilt.

        With a finite dependency range ``k`` only the blocks within ``k`` of
        ``z`` change; otherwise the whole window is rebuilt.
        """
        z = (int(z[0]), int(z[1]))
        if not self.y_window.contains(z):
            raise OutOfWindowError(f"Block {z} is outside the seed window")
        y_blocks = dict(self.y_blocks)
        y_blocks[z] = np.asarray(points, dtype=float).reshape(-1, 2)
        k = self.params.dependency_range
        if k is None:
            targets = list(self.window)
        else:
            targets = [w for w in BlockWindow.around(z, k) if self.window.contains(w)]
        return rebuild_blocks(self, targets, y_blocks)


def rebuild_blocks(
    env: Environment, targets: Sequence[BlockId], y_blocks: Optional[Mapping[BlockId, np.ndarray]] = None
) -> Environment:
    """
    Recompute the records of the target blocks, optionally from a new seed field.

    Args:
        env: Base environment
        targets: Blocks of ``env.window`` to recompute
        y_blocks: Replacement seed field (defaults to ``env.y_blocks``)

    Returns:
        New Environment sharing every other block record with ``env``
    """
    p = env.params
    y_blocks = env.y_blocks if y_blocks is None else y_blocks
    targets = [tuple(int(c) for c in z) for z in targets]
    for z in targets:
        if not env.window.contains(z):
            raise OutOfWindowError(f"Block {z} is outside the environment window")

    blocks = dict(env.blocks)
    if targets:
        y_box = Box.from_tuple(env.y_window.box(p))
        k = p.dependency_range
        if k is None:
            source = env.y_window
            grid_box = y_box
        else:
            source = _bounding_window(targets).expand(k).intersect(env.y_window)
            grid_box = _box_intersect(Box.from_tuple(source.box(p)).expand(p.L), y_box)
        tri = street_triangulation(p, y_blocks, source, grid_box)
        blocks.update(block_sites_from_edges(p, tri.segments(), targets))
        logger.debug(f"Rebuilt {len(targets)} blocks from {tri.n_vertices} vertices")

    new_env = Environment(
        p, env.window, env.y_window, y_blocks, blocks,
        seed=env.seed, trial=env.trial, width_quadrature=env.width_quadrature,
    )
    untouched = {z: m for z, m in env._width_cache.items() if z not in set(targets)}
    new_env._width_cache.update(untouched)
    return new_env


def build_from_y(
    p: ValidatedParams,
    window: BlockWindow,
    y_blocks: Mapping[BlockId, np.ndarray],
    seed: int = 0,
    trial: int = 0,
    y_window: Optional[BlockWindow] = None,
    width_quadrature: Optional[int] = None,
) -> Environment:
    """
    Build the environment of ``window`` from a given seed field.

    Args:
        p: Validated parameters
        window: Blocks whose sites are built
        y_blocks: Seed points per block
        seed: Master seed recorded for provenance
        trial: Trial index recorded for provenance
        y_window: Padded seed window (defaults to ``window`` padded by ``pad_blocks``)
        width_quadrature: Subgrid resolution for WIDTH masses

    Returns:
        Environment
    """
    y_window = window.expand(p.pad_blocks) if y_window is None else y_window
    tri = street_triangulation(p, y_blocks, y_window, Box.from_tuple(y_window.box(p)))
    blocks = block_sites_from_edges(p, tri.segments(), list(window))
    logger.debug(
        f"Built {p.variant.value} environment on {len(window)} blocks "
        f"({tri.n_vertices} vertices, {tri.edges.shape[0]} edges)"
    )
    return Environment(p, window, y_window, y_blocks, blocks, seed, trial, width_quadrature)


def build_environment(
    p: ValidatedParams,
    window: BlockWindow,
    seed: int,
    trial: int = 0,
    replicate: int = 0,
    width_quadrature: Optional[int] = None,
) -> Environment:
    """
    Sample the seed field and build the environment of a window.

    Args:
        p: Validated parameters
        window: Block window whose sites are needed
        seed: Master seed
        trial: Trial index (selects independent seed fields)
        replicate: Replicate index of the seed streams (0 for the base field)
        width_quadrature: Subgrid resolution for WIDTH masses

    Returns:
        Environment

    Raises:
        DegenerateInputError: Pure Delaunay with fewer than 3 seeds
    """
    y_window = window.expand(p.pad_blocks)
    y_blocks = sample_y_field(p, y_window, seed, trial, replicate)
    return build_from_y(p, window, y_blocks, seed, trial, y_window, width_quadrature)
