"""Parameters, lattice indexing and per-block random streams."""

from .params import ModelParams, ValidatedParams, Variant, validate_params, make_params, parse_fraction
from .indexing import (
    BlockId,
    SiteId,
    BlockWindow,
    Neighborhood,
    index_neighbors,
    block_of_site,
    local_site_index,
    site_of_local,
    local_sites_array,
    site_cube,
    block_box,
    sup_norm,
)
from .streams import Purpose, StreamKey, derive_stream, block_stream, zigzag

__all__ = [
    'ModelParams',
    'ValidatedParams',
    'Variant',
    'validate_params',
    'make_params',
    'parse_fraction',
    'BlockId',
    'SiteId',
    'BlockWindow',
    'Neighborhood',
    'index_neighbors',
    'block_of_site',
    'local_site_index',
    'site_of_local',
    'local_sites_array',
    'site_cube',
    'block_box',
    'sup_norm',
    'Purpose',
    'StreamKey',
    'derive_stream',
    'block_stream',
    'zigzag',
]
