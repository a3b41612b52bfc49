"""Union-of-balls clusters, crossing events and the exploration algorithm."""

from .clusters import SpatialHash, UnionFind, ClusterLabels, canonical_labels, close_pairs, build_clusters
from .regions import RegionKind, RegionSpec, connects
from .crossing import (
    MIN_CROSSING_INDEX,
    CrossingState,
    source_region,
    target_region,
    required_blocks,
    check_crossing_index,
    crossing_window,
    crossing_config,
    crossing_state,
    evaluate_f_n,
    crossing_profile,
    pivotal_flip,
)
from .exploration import (
    MIN_EXPLORATION_INDEX,
    check_exploration_index,
    ExplorationResult,
    ExplorationState,
    TraceRecord,
    explore,
    write_trace,
)

__all__ = [
    'SpatialHash',
    'UnionFind',
    'ClusterLabels',
    'canonical_labels',
    'close_pairs',
    'build_clusters',
    'RegionKind',
    'RegionSpec',
    'connects',
    'MIN_CROSSING_INDEX',
    'CrossingState',
    'source_region',
    'target_region',
    'required_blocks',
    'check_crossing_index',
    'crossing_window',
    'crossing_config',
    'crossing_state',
    'evaluate_f_n',
    'crossing_profile',
    'pivotal_flip',
    'MIN_EXPLORATION_INDEX',
    'check_exploration_index',
    'ExplorationResult',
    'ExplorationState',
    'TraceRecord',
    'explore',
    'write_trace',
]
