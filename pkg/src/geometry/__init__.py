"""Point sampling, Delaunay triangulation and segment clipping."""

from .sampling import Box, Point2, sample_poisson_block, grid_points, superimpose_grid
from .predicates import orient2d, incircle, incircle_perturbed, inside_circumcircle
from .segments import (
    Segment,
    GridPieces,
    liang_barsky,
    normalize_segment_rows,
    clip_segments_to_cube,
    clip_edges_to_grid,
    segmented_cumsum,
    distances_to_segments,
    min_distance_to_segments,
)
from .delaunay import (
    Triangulation,
    delaunay_triangulate,
    circumcircles,
    max_circumradius_ratio,
    write_triangulation,
    read_triangulation,
)

__all__ = [
    'Box',
    'Point2',
    'sample_poisson_block',
    'grid_points',
    'superimpose_grid',
    'orient2d',
    'incircle',
    'incircle_perturbed',
    'inside_circumcircle',
    'Segment',
    'GridPieces',
    'liang_barsky',
    'normalize_segment_rows',
    'clip_segments_to_cube',
    'clip_edges_to_grid',
    'segmented_cumsum',
    'distances_to_segments',
    'min_distance_to_segments',
    'Triangulation',
    'delaunay_triangulate',
    'circumcircles',
    'max_circumradius_ratio',
    'write_triangulation',
    'read_triangulation',
]
