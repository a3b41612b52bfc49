"""
Randomized exploration deciding ``f_n``.

The algorithm reveals the randomness ``Z_z`` of blocks one neighbourhood at a
time. It starts from the shell of blocks around ``|z|_inf = m``, grows every
cluster touching the shell ``dLambda_{Mm}`` by revealing the neighbourhoods of
the blocks it reaches, and stops when a source to target connection appears
or no cluster can grow further. Any connection crosses the shell of ``m``, so
the outcome always equals ``f_n``; the revealed set is what the revealment
estimates count.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Set, Union

import numpy as np
import pandas as pd

from ..cox import Driver
from ..environment import Environment
from ..lattice import BlockId, BlockWindow, sup_norm
from ..utils import get_logger
from ..utils.errors import BadExplorationIndexError, ParameterValidationError
from .clusters import UnionFind, close_pairs
from .crossing import (
    check_crossing_index,
    crossing_config,
    crossing_window,
    source_region,
    target_region,
)

logger = get_logger(__name__)

MIN_EXPLORATION_INDEX = 6

_SOURCE, _TARGET, _SEED = 1, 2, 4


@dataclass(frozen=True)
class TraceRecord:
    step: int
    zx: int
    zy: int
    reason: str


@dataclass
class ExplorationResult:
    """
    Attributes:
        outcome: Value of ``f_n`` found by the exploration
        revealed: Blocks whose randomness was revealed
        m: Shell index
        n: Crossing index
        steps: Growth steps after the initial shell
        trace: Reveal records in order (empty unless requested)
    """

    outcome: bool
    revealed: FrozenSet[BlockId]
    m: int
    n: int
    steps: int
    trace: List[TraceRecord] = field(default_factory=list)


def check_exploration_index(n: int, m: int) -> None:
    if not MIN_EXPLORATION_INDEX <= m <= n - 3:
        raise BadExplorationIndexError(
            f"Shell index m={m} must lie in [{MIN_EXPLORATION_INDEX}, n-3={n - 3}]"
        )


class ExplorationState:
    """
    Mutable state of one exploration: revealed and determined blocks, the
    union-find over the points of determined blocks and the blocks holding
    points of clusters that touch the shell of ``m`` (the grown set).
    """

    def __init__(self, driver: Driver, env: Environment, lam: float, n: int, m: int, trace: bool):
        p = env.params
        self.p = p
        self.m = m
        self.reach = p.dependency_range or 1
        self.universe = env.y_window
        self.window = crossing_window(p, n)

        config = crossing_config(driver, env, lam, n)
        pts = config.points
        r = p.ball_radius
        n_pts = pts.shape[0]
        blocks = np.floor_divide(config.sites, p.inv_b)
        self.point_block = [(int(a), int(b)) for a, b in blocks]
        self.points_in: Dict[BlockId, List[int]] = {}
        for idx, z in enumerate(self.point_block):
            self.points_in.setdefault(z, []).append(idx)

        i, j = close_pairs(pts, r)
        src = np.concatenate([i, j])
        dst = np.concatenate([j, i])
        order = np.argsort(src, kind="stable")
        self.nbr = dst[order]
        self.nbr_ptr = np.concatenate([[0], np.cumsum(np.bincount(src, minlength=n_pts))]).astype(np.int64)

        flags = np.zeros(n_pts, dtype=np.int64)
        flags[source_region(p).near(pts, r)] |= _SOURCE
        flags[target_region(p, n).near(pts, r)] |= _TARGET
        flags[target_region(p, m).near(pts, r)] |= _SEED
        self.point_flags = flags

        self.uf = UnionFind(n_pts)
        self.added = np.zeros(n_pts, dtype=bool)
        self.root_flags: Dict[int, int] = {}
        self.root_blocks: Dict[int, Set[BlockId]] = {}
        self.seed_blocks: Set[BlockId] = set()
        self.revealed: Set[BlockId] = set()
        self.determined: Set[BlockId] = set()
        self.found = False
        self.step = 0
        self.keep_trace = trace
        self.trace: List[TraceRecord] = []

    def _covered(self, z: BlockId, radius: int) -> bool:
        return all(
            w in self.revealed
            for w in BlockWindow.around(z, radius)
            if self.universe.contains(w)
        )

    def is_active(self, z: BlockId) -> bool:
        return z in self.revealed and not self._covered(z, self.reach + 1)

    @property
    def active(self) -> Set[BlockId]:
        return {z for z in self.revealed if self.is_active(z)}

    def reveal(self, blocks: Iterable[BlockId], reason: str) -> None:
        fresh = [z for z in blocks if self.universe.contains(z) and z not in self.revealed]
        for z in fresh:
            self.revealed.add(z)
            if self.keep_trace:
                self.trace.append(TraceRecord(self.step, z[0], z[1], reason))
        for z in fresh:
            for w in BlockWindow.around(z, self.reach):
                if w not in self.determined and self.window.contains(w) and self._covered(w, self.reach):
                    self._determine(w)

    def _merge(self, a: int, b: int) -> None:
        keep, gone = self.uf.union(a, b)
        if keep == gone:
            return
        flags = self.root_flags.pop(gone) | self.root_flags[keep]
        moved = self.root_blocks.pop(gone)
        if len(moved) > len(self.root_blocks[keep]):
            moved, self.root_blocks[keep] = self.root_blocks[keep], moved
        self.root_blocks[keep] |= moved
        self.root_flags[keep] = flags
        self._update(keep)

    def _update(self, root: int) -> None:
        flags = self.root_flags[root]
        if flags & _SEED:
            self.seed_blocks |= self.root_blocks[root]
        if flags & _SOURCE and flags & _TARGET:
            self.found = True

    def _determine(self, z: BlockId) -> None:
        self.determined.add(z)
        for i in self.points_in.get(z, ()):
            self.added[i] = True
            self.root_flags[i] = int(self.point_flags[i])
            self.root_blocks[i] = {z}
            self._update(i)
            for j in self.nbr[self.nbr_ptr[i]:self.nbr_ptr[i + 1]]:
                if self.added[j]:
                    self._merge(i, int(j))

    def run(self) -> bool:
        m = self.m
        shell = 2 + self.reach
        self.reveal(
            (z for z in self.universe if abs(sup_norm(z) - m) <= shell),
            "shell",
        )
        while not self.found:
            candidates = [z for z in self.seed_blocks if self.is_active(z)]
            if not candidates:
                break
            z = min(candidates, key=lambda w: (abs(sup_norm(w) - m), w))
            self.step += 1
            self.reveal(BlockWindow.around(z, self.reach + 1), "grow")
        return self.found


def explore(
    driver: Driver, env: Environment, lam: float, n: int, m: int, trace: bool = False
) -> ExplorationResult:
    """
    Decide ``f_n`` by exploration from the shell of index ``m``.

    Args:
        driver: Driver marks
        env: Environment
        lam: Level
        n: Crossing index
        m: Shell index in ``[6, n - 3]``
        trace: Record every revealed block

    Returns:
        ExplorationResult whose outcome equals ``evaluate_f_n``

    Raises:
        BadExplorationIndexError: ``m`` outside ``[6, n - 3]``
        ParameterValidationError: ``2 * ball_radius > M``
    """
    check_crossing_index(n)
    check_exploration_index(n, m)
    p = env.params
    if 2.0 * p.ball_radius > p.M:
        raise ParameterValidationError([("RANGE", f"exploration needs 2*ball_radius <= M, got M={p.M}")])
    state = ExplorationState(driver, env, lam, n, m, trace)
    outcome = state.run()
    logger.debug(
        f"Exploration n={n} m={m}: outcome={outcome}, {len(state.revealed)} blocks revealed "
        f"in {state.step} steps"
    )
    return ExplorationResult(
        outcome=outcome,
        revealed=frozenset(state.revealed),
        m=m,
        n=n,
        steps=state.step,
        trace=state.trace,
    )


def write_trace(result: ExplorationResult, path: Union[str, Path]) -> Path:
    """Write the exploration trace as CSV (``step,zx,zy,reason``)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(
        [(t.step, t.zx, t.zy, t.reason) for t in result.trace],
        columns=["step", "zx", "zy", "reason"],
    )
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# n={result.n}\n# m={result.m}\n# outcome={int(result.outcome)}\n")
        frame.to_csv(f, index=False)
    return path
