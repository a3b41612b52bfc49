"""Random street environments and their condition checks."""

from .sites import BlockSites, EnvironmentSite, inverse_position, locate_arc, points_on_pieces
from .width import WidthMass, edges_near_box, segment_box_distance, width_cube_mass, within_width
from .builder import (
    Environment,
    YField,
    build_environment,
    build_from_y,
    rebuild_blocks,
    sample_y_block,
    sample_y_field,
    block_sites_from_edges,
    street_triangulation,
    cube_boxes,
)
from .conditions import ConditionReport, check_conditions, chain_connected, grid_vertex_lower_bounds
from .dump import dump_environment, load_environment_dump

__all__ = [
    'BlockSites',
    'EnvironmentSite',
    'inverse_position',
    'locate_arc',
    'points_on_pieces',
    'WidthMass',
    'edges_near_box',
    'segment_box_distance',
    'width_cube_mass',
    'within_width',
    'Environment',
    'YField',
    'build_environment',
    'build_from_y',
    'rebuild_blocks',
    'sample_y_block',
    'sample_y_field',
    'block_sites_from_edges',
    'street_triangulation',
    'cube_boxes',
    'ConditionReport',
    'check_conditions',
    'chain_connected',
    'grid_vertex_lower_bounds',
    'dump_environment',
    'load_environment_dump',
]
