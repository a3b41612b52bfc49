"""
Driver marks of the Cox configuration.

Every site carries a Poisson process of marks ``(v, u, t)`` of unit intensity
on ``[0, 1] x [0, rho] x [0, lambda_max]``. Realizing at level ``lambda`` keeps
the marks with ``t <= lambda``, so configurations at different levels are
nested. Marks are drawn per block and per unit slab of ``t``; the marks below
any level therefore do not depend on ``lambda_max``.
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..environment import Environment, sample_y_block
from ..lattice import (
    BlockId,
    BlockWindow,
    Purpose,
    ValidatedParams,
    block_of_site,
    block_stream,
    local_sites_array,
)
from ..utils import get_logger
from ..utils.errors import MarkRangeError, OutOfWindowError

logger = get_logger(__name__)


@dataclass(frozen=True)
class BlockMarks:
    """
    Marks of all sites of one block, sorted by site, then ``t``, then ``v``.

    Attributes:
        site: ``(K, 2)`` site index of each mark
        v: Position coordinates in [0, 1]
        u: Acceptance marks in [0, rho]
        t: Coupling levels in [0, lambda_max]
    """

    site: np.ndarray
    v: np.ndarray
    u: np.ndarray
    t: np.ndarray

    @classmethod
    def empty(cls) -> "BlockMarks":
        return cls(np.empty((0, 2), dtype=np.int64), np.empty(0), np.empty(0), np.empty(0))

    @classmethod
    def sorted_from(cls, site: np.ndarray, v: np.ndarray, u: np.ndarray, t: np.ndarray) -> "BlockMarks":
        site = np.asarray(site, dtype=np.int64).reshape(-1, 2)
        order = np.lexsort((v, t, site[:, 1], site[:, 0]))
        return cls(site[order], v[order], u[order], t[order])

    def __len__(self) -> int:
        return int(self.v.shape[0])

    def of_site(self, k: Sequence[int]) -> np.ndarray:
        """Boolean selector of the marks of site ``k``."""
        return (self.site[:, 0] == int(k[0])) & (self.site[:, 1] == int(k[1]))

    def select(self, keep: np.ndarray) -> "BlockMarks":
        return BlockMarks(self.site[keep], self.v[keep], self.u[keep], self.t[keep])

    def merged(self, other: "BlockMarks") -> "BlockMarks":
        return BlockMarks.sorted_from(
            np.vstack([self.site, other.site]),
            np.concatenate([self.v, other.v]),
            np.concatenate([self.u, other.u]),
            np.concatenate([self.t, other.t]),
        )


class ResampleScope(str, Enum):
    SITE = "site"
    BLOCK = "block"
    ENV_BLOCK = "env_block"


@dataclass(frozen=True)
class Driver:
    """
    Driver marks on a block window.

    ``provenance`` names the stream each block was drawn from when it differs
    from the base ``DRIVER`` stream.
    """

    params: ValidatedParams
    window: BlockWindow
    lambda_max: float
    seed: int
    trial: int
    blocks: Dict[BlockId, BlockMarks]
    provenance: Dict[BlockId, str] = field(default_factory=dict)

    def marks(self, z: Sequence[int]) -> BlockMarks:
        z = (int(z[0]), int(z[1]))
        if z not in self.blocks:
            raise OutOfWindowError(f"Block {z} is outside the driver window")
        return self.blocks[z]

    def site_marks(self, k: Sequence[int]) -> BlockMarks:
        data = self.marks(block_of_site(k, self.params))
        return data.select(data.of_site(k))

    @property
    def n_marks(self) -> int:
        return sum(len(m) for m in self.blocks.values())

    def with_block(self, z: BlockId, marks: BlockMarks, source: str) -> "Driver":
        blocks = dict(self.blocks)
        blocks[z] = marks
        provenance = dict(self.provenance)
        provenance[z] = source
        return replace(self, blocks=blocks, provenance=provenance)


def sample_block_marks(
    p: ValidatedParams,
    z: Sequence[int],
    lambda_max: float,
    seed: int,
    trial: int = 0,
    purpose: Purpose = Purpose.DRIVER,
    replicate: int = 0,
) -> BlockMarks:
    """
    Marks of one block up to level ``lambda_max``.

    Slab ``s`` covers ``t`` in ``[s, s + 1)`` and is drawn from its own stream:
    the per-site counts, then ``v``, ``u`` and ``t`` for all marks of the slab.
    """
    n_slabs = math.ceil(lambda_max)
    if n_slabs <= 0:
        return BlockMarks.empty()
    z = (int(z[0]), int(z[1]))
    local = local_sites_array(p)
    origin = np.array([z[0] * p.inv_b, z[1] * p.inv_b], dtype=np.int64)
    S = local.shape[0]
    sites, vs, us, ts = [], [], [], []
    for s in range(n_slabs):
        rng = block_stream(seed, z, purpose, trial=trial, replicate=replicate, slab=s)
        counts = rng.poisson(p.rho, S)
        total = int(counts.sum())
        v = rng.random(total)
        u = rng.random(total) * p.rho
        t = s + rng.random(total)
        keep = t <= lambda_max
        sites.append((origin + np.repeat(local, counts, axis=0))[keep])
        vs.append(v[keep])
        us.append(u[keep])
        ts.append(t[keep])
    return BlockMarks.sorted_from(np.vstack(sites), np.concatenate(vs), np.concatenate(us), np.concatenate(ts))


def sample_driver(
    p: ValidatedParams, window: BlockWindow, lambda_max: float, seed: int, trial: int = 0
) -> Driver:
    """
    Sample the driver marks of every block of a window.

    Args:
        p: Validated parameters
        window: Block window
        lambda_max: Largest level that will be realized
        seed: Master seed
        trial: Trial index

    Returns:
        Driver

    Raises:
        MarkRangeError: ``lambda_max`` is negative or below ``p.lam``
    """
    if not lambda_max >= 0 or lambda_max < p.lam:
        raise MarkRangeError(f"lambda_max={lambda_max} must be nonnegative and at least lambda={p.lam}")
    blocks = {z: sample_block_marks(p, z, lambda_max, seed, trial) for z in window}
    driver = Driver(p, window, float(lambda_max), int(seed), int(trial), blocks)
    logger.debug(f"Sampled {driver.n_marks} driver marks on {len(window)} blocks (trial {trial})")
    return driver


def with_inserted_mark(driver: Driver, x: Sequence[int], r: float, u: float) -> Driver:
    """
    Copy of ``driver`` with the mark ``(r, u)`` added at site ``x`` with ``t = 0``.

    Raises:
        MarkRangeError: ``r`` outside [0, 1] or ``u`` outside [0, rho]
        OutOfWindowError: ``x`` outside the driver window
    """
    if not 0.0 <= r <= 1.0 or not 0.0 <= u <= driver.params.rho:
        raise MarkRangeError(f"Mark ({r}, {u}) outside [0, 1] x [0, {driver.params.rho:g}]")
    z = block_of_site(x, driver.params)
    base = driver.marks(z)
    extra = BlockMarks(
        np.array([[int(x[0]), int(x[1])]], dtype=np.int64),
        np.array([float(r)]),
        np.array([float(u)]),
        np.array([0.0]),
    )
    return driver.with_block(z, base.merged(extra), "INSERTED")


def resample(
    driver: Driver,
    scope: ResampleScope,
    target: Sequence[int],
    replicate: int,
    env: Optional[Environment] = None,
) -> Tuple[Driver, Optional[Environment]]:
    """
    Replace part of the randomness with an independent copy.

    Args:
        driver: Base driver
        scope: SITE (marks of site ``target``), BLOCK (marks of all sites of
            block ``target``) or ENV_BLOCK (seed points of block ``target``)
        target: Site index or block id
        replicate: Replicate index ``j`` of the resampling streams
        env: Environment, required for ENV_BLOCK

    Returns:
        Tuple of (driver, environment); the environment is the rebuilt copy for
        ENV_BLOCK and ``env`` unchanged otherwise

    Raises:
        OutOfWindowError: Target outside the window
    """
    scope = ResampleScope(scope)
    p = driver.params
    source = f"RESAMPLE_DRIVER:{replicate}"

    if scope is ResampleScope.ENV_BLOCK:
        if env is None:
            raise ValueError("ENV_BLOCK resampling needs the environment")
        z = (int(target[0]), int(target[1]))
        if not env.y_window.contains(z):
            raise OutOfWindowError(f"Block {z} is outside the seed window")
        points = sample_y_block(p, z, env.seed, env.trial, purpose=Purpose.RESAMPLE_ENV, replicate=replicate)
        return driver, env.with_y_block(z, points)

    if scope is ResampleScope.BLOCK:
        z = (int(target[0]), int(target[1]))
        driver.marks(z)
        fresh = sample_block_marks(
            p, z, driver.lambda_max, driver.seed, driver.trial,
            purpose=Purpose.RESAMPLE_DRIVER, replicate=replicate,
        )
        return driver.with_block(z, fresh, source), env

    z = block_of_site(target, p)
    base = driver.marks(z)
    fresh = sample_block_marks(
        p, z, driver.lambda_max, driver.seed, driver.trial,
        purpose=Purpose.RESAMPLE_DRIVER, replicate=replicate,
    )
    kept = base.select(~base.of_site(target))
    swapped = kept.merged(fresh.select(fresh.of_site(target)))
    return driver.with_block(z, swapped, source), env
