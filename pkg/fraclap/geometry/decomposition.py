# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.stats import qmc

from ..common.common import logger
from ..common.errors import DomainError
from ..common.utils import as_points
from .polygon import Polygon
from .regions import Region, VertexNbhd, VertexEdgeNbhd, EdgeNbhd, Interior

KINDS = ('vertex', 'vertex_edge', 'edge', 'interior')


class NeighborhoodDecomposition:
    """Regions ordered [vertex..., vertex_edge..., edge..., interior]; the order
    is also the priority used by `classify` where predicates tie."""

    def __init__(self, polygon:Polygon, xi:float, xi_requested:float, halvings:int,
                 width_factor:float, regions:List[Region]) -> None:
        self.polygon, self.xi, self.xi_requested = polygon, xi, xi_requested
        self.halvings, self.width_factor = halvings, width_factor
        self.regions = regions

    @property
    def edge_width(self)->float:
        return self.width_factor*self.xi**2

    @property
    def labels(self)->List[str]:
        return [r.label for r in self.regions]

    @property
    def interior(self)->Interior:
        return self.regions[-1]

    def of_kind(self, kind:str)->List[Region]:
        if kind not in KINDS:
            raise DomainError(f'unknown region kind "{kind}"')
        return [r for r in self.regions if r.kind == kind]

    def region(self, label:str)->Region:
        for r in self.regions:
            if r.label == label:
                return r
        raise DomainError(f'no region labelled "{label}"')

    def classify(self, points)->np.ndarray:
        """Index into `regions` for every point, -1 for points outside Ω."""
        pts = as_points(points, 2)
        out = np.full(len(pts), -1, dtype=int)
        inside = self.polygon.contains(pts)
        # interior is whatever is left
        for k, r in enumerate(self.regions[:-1]):
            hit = (out < 0) & r.contains(pts)
            out[hit] = k
        out[(out < 0) & inside] = len(self.regions) - 1
        return out

    def kind_of(self, points)->np.ndarray:
        idx = self.classify(points)
        kinds = np.array([r.kind for r in self.regions] + ['outside'])
        return kinds[idx]

    def interior_distance(self, n:int=4096, seed:int=0)->float:
        """Sampled lower bound estimate of dist(Ω_int, ∂Ω)."""
        pts = self.interior.sample(n, seed)
        if len(pts) == 0:
            return math.inf
        return float(np.min(self.polygon.boundary_distance(pts)))

    def areas(self)->Dict[str, float]:
        return {r.label: r.area() for r in self.regions}

    def summary(self)->Dict:
        return {'polygon': self.polygon.name, 'xi': self.xi, 'xi_requested': self.xi_requested,
                'halvings': self.halvings, 'edge_width': self.edge_width,
                'regions': self.labels, 'areas': self.areas()}


def default_xi(polygon:Polygon)->float:
    return 0.25*min(polygon.min_edge_length, polygon.min_vertex_separation)


def _analytic_violations(polygon:Polygon, xi:float, width:float)->List[str]:
    bad = []
    if xi >= 1.0:
        bad.append('xi >= 1')
    if xi >= 0.5*polygon.min_vertex_separation:
        bad.append('vertex neighborhoods overlap')
    if xi > 0.5*polygon.min_edge_length:
        bad.append('xi exceeds half an edge')
    if 2*width >= polygon.nonadjacent_edge_distance():
        bad.append('edge strips overlap')
    for v in range(polygon.n):
        theta = polygon.interior_angle(v)
        if theta < math.pi and xi > math.sin(theta/2):
            bad.append(f'vertex-edge neighborhoods overlap at v{v}')
    return bad


def _sampled_overlaps(polygon:Polygon, regions:List[Region], n:int, seed:int)->int:
    """Number of sampled points claimed twice by regions of one kind."""
    if n <= 0:
        return 0
    lo, hi = polygon.bbox
    m = max(1, int(math.ceil(math.log2(n))))
    pts = lo + (hi - lo)*qmc.Sobol(d=2, scramble=True, seed=seed).random_base2(m)
    pts = pts[polygon.contains(pts)]
    bad = 0
    for kind in KINDS[:-1]:
        counts = np.zeros(len(pts), dtype=int)
        for r in regions:
            if r.kind == kind:
                counts += r.contains(pts)
        bad += int(np.sum(counts > 1))
    return bad


def _build_regions(polygon:Polygon, xi:float, width:float)->List[Region]:
    regions:List[Region] = [VertexNbhd(polygon, v, xi) for v in range(polygon.n)]
    for v in range(polygon.n):
        for e in polygon.edges_at(v):
            regions.append(VertexEdgeNbhd(polygon, v, e, xi))
    regions.extend(EdgeNbhd(polygon, e, xi, width) for e in range(polygon.n))
    regions.append(Interior(polygon, xi, list(regions)))
    return regions


def decompose(polygon:Polygon, xi:Optional[float]=None, width_factor:float=1.0,
              check_samples:int=4096, seed:int=0, max_halvings:int=30)->NeighborhoodDecomposition:
    """Vertex, vertex-edge, edge and interior neighborhoods at scale ξ.

    ξ defaults to a quarter of the smallest edge or vertex separation. While the
    neighborhoods of one kind are not pairwise disjoint (by the closed-form
    conditions, then by `check_samples` quasi-random points) ξ is halved; the
    effective value is reported on the result. The edge strips have width
    width_factor·ξ².
    """
    xi_requested = default_xi(polygon) if xi is None else float(xi)
    if not xi_requested > 0 or not math.isfinite(xi_requested):
        raise DomainError(f'xi={xi_requested} must be positive')
    if not width_factor > 0:
        raise DomainError(f'edge width factor {width_factor} must be positive')

    cur = xi_requested
    for halvings in range(max_halvings + 1):
        width = width_factor*cur**2
        reasons = _analytic_violations(polygon, cur, width)
        if width > cur:
            reasons.append('edge width exceeds xi')
        if not reasons:
            regions = _build_regions(polygon, cur, width)
            overlaps = _sampled_overlaps(polygon, regions, check_samples, seed)
            if overlaps == 0:
                if halvings:
                    logger.warn({'xi_halved': halvings, 'xi': cur, 'xi_requested': xi_requested},
                                exists_ok=True)
                logger.info({'decomposition': polygon.name, 'xi': cur, 'regions': len(regions)},
                            exists_ok=True)
                return NeighborhoodDecomposition(polygon, cur, xi_requested, halvings,
                                                 width_factor, regions)
            reasons.append(f'{overlaps} sampled points claimed twice')
        logger.debug({'xi_rejected': cur, 'reasons': reasons}, exists_ok=True)
        cur *= 0.5
    raise DomainError(f'no disjoint decomposition of {polygon.name} within {max_halvings} halvings')


def equivalence_constants(region:VertexNbhd, n:int=4096, seed:int=0)->Dict[int, Tuple[float, float]]:
    """Measured (min, max) of r_e/r_v on ω_v for each edge at the vertex."""
    pts = region.sample(n, seed, radial='log')
    out:Dict[int, Tuple[float, float]] = {}
    if len(pts) == 0:
        return out
    r_v = region.distance(pts)
    for e in region.polygon.edges_at(region.vertex):
        r_e = region.polygon.edge_distances(pts)[:, e]
        ratio = r_e/r_v
        out[e] = (float(ratio.min()), float(ratio.max()))
    return out
