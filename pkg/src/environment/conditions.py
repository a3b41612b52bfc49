"""
Environment condition checks.

Empirical checks of the four structural conditions the percolation results
rest on: 1-dependence, bounded intensity, coverage and essential
connectedness, plus the circumradius bound that makes the grid variants
finitely dependent. Failures are recorded in the report, never raised.
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage, sparse

from ..geometry import Box, max_circumradius_ratio
from ..lattice import (
    BlockId,
    BlockWindow,
    Purpose,
    SiteId,
    ValidatedParams,
    Variant,
    block_of_site,
    block_stream,
    local_site_index,
)
from ..utils import get_logger, wilson_interval
from ..utils.errors import CoxPercError, DegenerateInputError, ParameterValidationError
from .builder import (
    Environment,
    block_sites_from_edges,
    build_environment,
    cube_boxes,
    sample_y_block,
    street_triangulation,
)

logger = get_logger(__name__)

ETA_GRID_STEPS = 40
CIRCUMRADIUS_TOLERANCE = 1e-9

# 8-neighbourhood: adjacency is d_inf distance exactly one site
_EIGHT = np.ones((3, 3), dtype=bool)


@dataclass
class ConditionReport:
    """Outcome of ``check_conditions``; every field is filled."""

    variant: str
    eta: float
    q0: float
    sites_checked: int
    one_dependence: bool
    one_dependence_counterexample: Optional[List[int]]
    bounded_intensity: bool
    max_mass: float
    rho: float
    coverage_estimate: float
    coverage_ci: Tuple[float, float]
    coverage_trials: int
    coverage_above_q0: bool
    coverage_lower_bound: float
    site_coverage_estimate: float
    site_coverage_lower_bound: float
    essential_connectedness: Optional[bool]
    blocks_checked: int
    largest_eta_passing: Optional[float]
    circumradius_ratio: Optional[float]
    circumradius_ok: Optional[bool]
    width_error_bound: float
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["coverage_ci"] = [float(c) for c in self.coverage_ci]
        return out


def grid_vertex_lower_bounds(p: ValidatedParams, z: Sequence[int] = (0, 0)) -> Tuple[float, float]:
    """
    Closed-form coverage lower bounds for the grid variants.

    A grid vertex of ``L Z^2`` is a Delaunay vertex whatever the seeds are, and
    every edge leaving a vertex in the open interior of a cube has positive
    length inside it. Such cubes are therefore always non-empty.

    Returns:
        Tuple of (block bound, fraction of cubes of block ``z`` with a grid
        vertex in their interior); both 0 for pure Delaunay
    """
    if not p.variant.uses_grid:
        return 0.0, 0.0
    cubes = cube_boxes(z, p)
    L = p.L

    def open_hit(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        first = np.floor(lo / L) + 1.0
        return first * L < hi

    hit = open_hit(cubes[:, 0], cubes[:, 2]) & open_hit(cubes[:, 1], cubes[:, 3])
    lo = np.array([z[0], z[1]], dtype=float) * p.M
    block_hit = bool(np.all(open_hit(lo, lo + p.M)))
    return (1.0 if block_hit or np.any(hit) else 0.0), float(np.mean(hit))


def chain_connected(supported: np.ndarray, nonempty: np.ndarray) -> bool:
    """
    Whether all marked sites are pairwise joined by chains of adjacent
    supported sites.

    Two marked sites are joined if they are adjacent, or if both touch the same
    8-connected component of ``supported``.

    Args:
        supported: 2-d boolean grid of eta-supported sites
        nonempty: ``(K, 2)`` grid positions of the sites that must be joined

    Returns:
        True if every pair is joined (trivially for fewer than two sites)
    """
    pos = np.asarray(nonempty, dtype=np.int64).reshape(-1, 2)
    k = pos.shape[0]
    if k < 2:
        return True
    labels, n_labels = ndimage.label(supported, structure=_EIGHT)
    padded = np.pad(labels, 1)
    index = np.full(padded.shape, -1, dtype=np.int64)
    index[pos[:, 0] + 1, pos[:, 1] + 1] = np.arange(k)

    present = np.zeros((k, n_labels + 1), dtype=bool)
    src: List[np.ndarray] = []
    dst: List[np.ndarray] = []
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            present[np.arange(k), padded[pos[:, 0] + 1 + dx, pos[:, 1] + 1 + dy]] = True
            if dx or dy:
                nb = index[pos[:, 0] + 1 + dx, pos[:, 1] + 1 + dy]
                hit = nb >= 0
                src.append(np.nonzero(hit)[0])
                dst.append(nb[hit])

    # sites with the same set of touching components behave alike
    if n_labels:
        signatures, group = np.unique(present[:, 1:], axis=0, return_inverse=True)
        group = group.reshape(-1)
        sig = signatures.astype(np.int64)
        shares = (sig @ sig.T) > 0
    else:
        group = np.zeros(k, dtype=np.int64)
        shares = np.zeros((1, 1), dtype=bool)
    g = shares.shape[0]
    sizes = np.bincount(group, minlength=g)
    adjacent = sparse.coo_matrix(
        (np.ones(sum(s.shape[0] for s in src), dtype=np.int64),
         (group[np.concatenate(src)], group[np.concatenate(dst)])),
        shape=(g, g),
    ).toarray()
    pairs = np.outer(sizes, sizes) - np.diag(sizes)
    return bool(np.all(shares | (adjacent == pairs)))


def _connectivity_blocks(env: Environment, rng: np.random.Generator, limit: Optional[int]) -> List[BlockId]:
    candidates = [z for z in env.window if env.window.contains_window(BlockWindow.around(z, 2))]
    if limit is not None and len(candidates) > limit:
        picks = rng.choice(len(candidates), size=limit, replace=False)
        candidates = [candidates[i] for i in sorted(picks)]
    return candidates


def _neighbourhood_grids(env: Environment, blocks: Sequence[BlockId]) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Mass grid of I_b^{++}(z) and the positions of the non-empty sites of I_b^+(z)."""
    n = env.params.inv_b
    out = []
    for z in blocks:
        masses = env.mass_grid(BlockWindow.around(z, 2))
        inner = masses[n:4 * n, n:4 * n]
        out.append((masses, np.argwhere(inner > 0) + n))
    return out


def _essential_at(grids: Sequence[Tuple[np.ndarray, np.ndarray]], eta: float) -> bool:
    return all(chain_connected(masses >= eta, pos) for masses, pos in grids)


def _check_one_dependence(
    env: Environment, sites: Sequence[SiteId], seed: int
) -> Tuple[bool, Optional[SiteId], List[str]]:
    p = env.params
    y_box = Box.from_tuple(env.y_window.box(p))
    by_block: Dict[BlockId, List[SiteId]] = {}
    for k in sites:
        by_block.setdefault(block_of_site(k, p), []).append(k)

    notes: List[str] = []
    for j, (z, ks) in enumerate(sorted(by_block.items())):
        keep = BlockWindow.around(z, 1)
        y_new = {
            w: (pts if keep.contains(w) else sample_y_block(
                p, w, seed, env.trial, purpose=Purpose.RESAMPLE_ENV, replicate=j + 1
            ))
            for w, pts in env.y_blocks.items()
        }
        try:
            tri = street_triangulation(p, y_new, env.y_window, y_box)
        except DegenerateInputError as exc:
            notes.append(f"one-dependence check skipped block {z}: {exc}")
            continue
        fresh = block_sites_from_edges(p, tri.segments(), [z])[z]
        base = env.block(z)
        for k in ks:
            if not fresh.same_as(base, local_site_index(k, p)):
                logger.info(f"1-dependence counterexample at site {k} (block {z})")
                return False, k, notes
    return True, None, notes


def check_conditions(
    env: Environment,
    eta: Optional[float] = None,
    q0: float = 0.9999,
    n_blocks: int = 200,
    seed: Optional[int] = None,
    n_sites: int = 50,
    n_connect_blocks: Optional[int] = 10,
) -> ConditionReport:
    """
    Check the environment conditions empirically.

    Args:
        env: Built environment
        eta: Support threshold for essential connectedness (defaults to ``params.eta``)
        q0: Coverage threshold; the report prints the comparison only
        n_blocks: Fresh environments for the coverage estimate
        seed: Master seed of the check streams (defaults to ``env.seed``)
        n_sites: Sites sampled for the 1-dependence check
        n_connect_blocks: Blocks sampled for essential connectedness (None for all)

    Returns:
        ConditionReport

    Raises:
        ParameterValidationError: ``eta`` is not positive
    """
    p = env.params
    eta = p.eta if eta is None else float(eta)
    if not eta > 0:
        raise ParameterValidationError([("NONPOSITIVE", f"eta must be positive, got {eta}")])
    seed = env.seed if seed is None else int(seed)
    rng = block_stream(seed, (0, 0), Purpose.ALG, trial=env.trial)
    notes: List[str] = []

    # (i) 1-dependence
    lo, hi = env.window.site_range(p)
    picks = np.column_stack([
        rng.integers(lo[0], hi[0], size=n_sites),
        rng.integers(lo[1], hi[1], size=n_sites),
    ])
    sites = [(int(a), int(b)) for a, b in picks]
    one_dep, counterexample, dep_notes = _check_one_dependence(env, sites, seed)
    notes.extend(dep_notes)
    if p.dependency_range is not None and p.dependency_range > 1:
        notes.append(f"dependency range is {p.dependency_range} blocks (M < sqrt(2) L)")

    # (ii) bounded intensity
    masses = env.mass_grid()
    max_mass = float(masses.max()) if masses.size else 0.0
    bounded = max_mass <= p.rho
    if p.variant in (Variant.DEL, Variant.DEL_GRID) and not bounded:
        notes.append("uncapped variant: masses above rho exceed the driver ceiling")

    # (iii) coverage of the origin block over fresh environments
    origin = BlockWindow((0, 0), (1, 1))
    hits = 0
    site_fraction = 0.0
    trials = 0
    for i in range(n_blocks):
        try:
            fresh = build_environment(
                p, origin, seed, trial=env.trial, replicate=i + 1, width_quadrature=env.width_quadrature
            )
        except DegenerateInputError as exc:
            notes.append(f"coverage sample {i} skipped: {exc}")
            continue
        mask = fresh.nonempty_mask((0, 0))
        hits += int(np.any(mask))
        site_fraction += float(np.mean(mask))
        trials += 1
    coverage = hits / trials if trials else 0.0
    ci = wilson_interval(hits, trials)
    block_bound, site_bound = grid_vertex_lower_bounds(p)
    site_coverage = site_fraction / trials if trials else 0.0

    # (iv) essential connectedness
    blocks = _connectivity_blocks(env, rng, n_connect_blocks)
    if blocks:
        grids = _neighbourhood_grids(env, blocks)
        essential: Optional[bool] = _essential_at(grids, eta)
        largest = None
        for k in range(ETA_GRID_STEPS + 1):
            candidate = p.rho * 2.0 ** (-k)
            if _essential_at(grids, candidate):
                largest = candidate
                break
    else:
        essential, largest = None, None
        notes.append("window too small for essential connectedness (needs a 5x5 block neighbourhood)")

    # circumradius bound of the grid variants
    ratio: Optional[float] = None
    ratio_ok: Optional[bool] = None
    if p.variant.uses_grid:
        try:
            ratio, _ = max_circumradius_ratio(
                env.triangulation(), Box.from_tuple(env.window.box(p)), p.L
            )
            ratio_ok = ratio <= 1.0 + CIRCUMRADIUS_TOLERANCE
        except CoxPercError as exc:
            notes.append(f"circumradius check failed: {exc}")

    report = ConditionReport(
        variant=p.variant.value,
        eta=eta,
        q0=q0,
        sites_checked=len(sites),
        one_dependence=one_dep,
        one_dependence_counterexample=list(counterexample) if counterexample is not None else None,
        bounded_intensity=bool(bounded),
        max_mass=max_mass,
        rho=p.rho,
        coverage_estimate=coverage,
        coverage_ci=ci,
        coverage_trials=trials,
        coverage_above_q0=coverage > q0,
        coverage_lower_bound=block_bound,
        site_coverage_estimate=site_coverage,
        site_coverage_lower_bound=site_bound,
        essential_connectedness=essential,
        blocks_checked=len(blocks),
        largest_eta_passing=largest,
        circumradius_ratio=ratio,
        circumradius_ok=ratio_ok,
        width_error_bound=env.width_error_bound,
        notes=notes,
    )
    logger.info(
        f"Conditions ({p.variant.value}): 1-dep={one_dep}, bounded={bounded}, "
        f"coverage={coverage:.4f}, essential={essential}"
    )
    return report
