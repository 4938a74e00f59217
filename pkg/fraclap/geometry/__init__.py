# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

from .polygon import Polygon, Distances, distances, segment_distance, load_polygon, \
    save_polygon, unit_square, l_shape, sector, quarter_plane, make_polygon, PRESETS
from .regions import RegionFrame, Region, VertexNbhd, VertexEdgeNbhd, EdgeNbhd, Interior
from .decomposition import NeighborhoodDecomposition, decompose, default_xi, \
    equivalence_constants, KINDS
from .covering import TailSum, BallCovering, VertexEdgeCovering, cover_vertex, \
    cover_vertex_edge, cover_edge, certify_overlap, certify_coverage, tail_sums, \
    radius_distance_constant, check_parameters, half_ball_limit, write_covering_csv, \
    write_certificate, TRUNCATION, DEFAULT_DELTAS, EDGE_DELTAS
