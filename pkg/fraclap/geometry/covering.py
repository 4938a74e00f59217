# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Ball coverings of the vertex, vertex-edge and edge neighborhoods with radii
proportional to the distance to the vertex or edge.

Centers come from a greedy net over a fine candidate set (processed in
decreasing distance, so large balls are placed first) or, for edge strips, from
an explicit geometric lattice. Coverage and the overlap of the stretched balls
are certified by sampling: the overlap count is re-measured with doubled sample
counts until it stops changing.
"""

from dataclasses import dataclass, field
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree
from tqdm import tqdm

from ..common.common import logger
from ..common.errors import DomainError, ParameterError
from ..common.timing import MeasureTime
from ..common.utils import make_rng
from ..common.artifacts import ArtifactHeader, write_csv, write_json
from .regions import Region, VertexNbhd, VertexEdgeNbhd, EdgeNbhd

TRUNCATION = 1e-12
DEFAULT_DELTAS = (0.5, 1.0)
EDGE_DELTAS = (1.0, 1.5)

# greedy net: a kept center claims candidates within NET_CLAIM*c*dist, candidates
# lie within NET_SPACING*c*dist of every point, NET_CLAIM + NET_SPACING < 1
NET_CLAIM = 0.75
NET_SPACING = 0.1


@dataclass
class TailSum:
    """Partial sums of Σ R_i^δ accumulated level by level."""
    delta: float
    partial: np.ndarray
    ratio: float
    tail_estimate: float
    converged: bool

    @property
    def total(self)->float:
        return float(self.partial[-1]) if len(self.partial) else 0.0

    def as_dict(self)->Dict:
        return {'delta': self.delta, 'total': self.total, 'levels': len(self.partial),
                'ratio': self.ratio, 'tail_estimate': self.tail_estimate,
                'converged': self.converged}


@dataclass
class BallCovering:
    """Balls B(center_i, c·dist_i), stretched to radius c_hat·dist_i for the
    overlap count. `dists` is the distance of each center to the vertex or edge
    the covering is refined towards; `floor` the smallest distance covered."""
    region: Optional[Region]
    kind: str
    centers: np.ndarray
    dists: np.ndarray
    level: np.ndarray
    c: float
    c_hat: float
    c_tilde: float
    floor: float = 0.0
    overlap_N: int = 0
    overlap_history: List[Tuple[int, int]] = field(default_factory=list)
    coverage: float = math.nan
    n_samples: int = 0
    delta_tail: Dict[float, TailSum] = field(default_factory=dict)
    level_ratio: float = 0.5
    distance_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __len__(self)->int:
        return len(self.centers)

    @property
    def is_empty(self)->bool:
        return len(self.centers) == 0

    @property
    def radii(self)->np.ndarray:
        return self.c*self.dists

    @property
    def stretched_radii(self)->np.ndarray:
        return self.c_hat*self.dists

    @property
    def label(self)->str:
        return self.region.label if self.region is not None else 'reference'

    def distance(self, points:np.ndarray)->np.ndarray:
        if self.distance_fn is not None:
            return self.distance_fn(points)
        return self.region.distance(points)

    def rows(self)->List[Tuple]:
        return [(self.kind, x, y, r, int(l))
                for (x, y), r, l in zip(self.centers, self.radii, self.level)]

    def certificate(self)->Dict:
        return {'region': self.label, 'kind': self.kind, 'count': len(self),
                'c': self.c, 'c_hat': self.c_hat, 'c_tilde': self.c_tilde,
                'floor': self.floor, 'overlap_N': self.overlap_N,
                'overlap_history': [list(h) for h in self.overlap_history],
                'coverage': self.coverage, 'n_samples': self.n_samples,
                'delta_tail': {str(d): t.as_dict() for d, t in self.delta_tail.items()}}


@dataclass
class VertexEdgeCovering:
    """Half-balls H_i centered on the edge plus one reference sub-covering of
    the half-disk of radius c (unit distance to the vertex); the sub-covering of
    H_i is the reference scaled by the distance of x_i to the vertex."""
    outer: BallCovering
    reference: BallCovering
    c1: float
    c1_hat: float
    containment: bool

    def sub_covering(self, i:int)->BallCovering:
        frame = self.outer.region.frame
        scale = self.outer.dists[i]
        t, n = self.reference.centers[:, 0], self.reference.centers[:, 1]
        centers = self.outer.centers[i] + scale*(np.outer(t, frame.tangent) + np.outer(n, frame.normal))
        ref = self.reference
        return BallCovering(self.outer.region, 'ball', centers, scale*ref.dists, ref.level.copy(),
                            ref.c, ref.c_hat, ref.c_tilde, floor=scale*ref.floor,
                            overlap_N=ref.overlap_N, coverage=ref.coverage, n_samples=ref.n_samples,
                            distance_fn=self.outer.region.edge_distance)

    def certificate(self)->Dict:
        return {'outer': self.outer.certificate(), 'reference': self.reference.certificate(),
                'c1': self.c1, 'c1_hat': self.c1_hat, 'containment': self.containment}


def check_parameters(c:float, c_tilde:float, c_hat:float)->None:
    """0 < c < c_tilde < c_hat < 1."""
    if not 0 < c < 1:
        raise ParameterError('c', c, (0.0, min(c_tilde, 1.0)))
    if not c < c_tilde:
        raise ParameterError('c_tilde', c_tilde, (c, min(c_hat, 1.0)))
    if not c_tilde < c_hat < 1:
        raise ParameterError('c_hat', c_hat, (c_tilde, 1.0))


def _greedy_net(candidates:np.ndarray, dists:np.ndarray, c:float)->np.ndarray:
    """Indices of kept candidates; a kept candidate claims every candidate within
    NET_CLAIM·c·dist of itself."""
    if len(candidates) == 0:
        return np.zeros(0, dtype=int)
    order = np.argsort(-dists, kind='stable')
    tree = cKDTree(candidates)
    covered = np.zeros(len(candidates), dtype=bool)
    keep = []
    for i in order:
        if covered[i]:
            continue
        keep.append(i)
        covered[tree.query_ball_point(candidates[i], NET_CLAIM*c*dists[i])] = True
    return np.array(keep, dtype=int)


def _geometric_levels(lo:float, hi:float, ratio:float)->np.ndarray:
    count = int(math.ceil(math.log(hi/lo)/math.log(ratio))) + 1
    return np.geomspace(lo, hi, max(count, 2))


def _count_hits(points:np.ndarray, centers:np.ndarray, dists:np.ndarray, factor:float,
                point_dists:np.ndarray, tree:Optional[cKDTree]=None)->np.ndarray:
    """Number of balls B(center_i, factor·dist_i) containing each point. Since the
    distance function is 1-Lipschitz such a center lies within
    factor·d(x)/(1 - factor) of the point."""
    if len(points) == 0 or len(centers) == 0:
        return np.zeros(len(points), dtype=int)
    if tree is None:
        tree = cKDTree(centers)
    lists = tree.query_ball_point(points, factor*point_dists/(1.0 - factor))
    lens = np.fromiter((len(l) for l in lists), dtype=int, count=len(lists))
    if lens.sum() == 0:
        return np.zeros(len(points), dtype=int)
    flat = np.concatenate([np.asarray(l, dtype=int) for l in lists])
    owner = np.repeat(np.arange(len(points)), lens)
    hit = np.linalg.norm(points[owner] - centers[flat], axis=1) < factor*dists[flat]
    return np.bincount(owner[hit], minlength=len(points))


def certify_overlap(centers:np.ndarray, dists:np.ndarray, factor:float,
                    distance:Callable[[np.ndarray], np.ndarray],
                    inside:Callable[[np.ndarray], np.ndarray], seed:int=0,
                    n_start:int=4096, n_max:int=1 << 18,
                    progress:bool=False)->Tuple[int, List[Tuple[int, int]]]:
    """Largest number of stretched balls B(center_i, factor·dist_i) sharing a
    sampled point, re-measured with doubled samples until two counts agree."""
    if len(centers) == 0:
        return 0, []
    rng = make_rng(seed)
    tree = cKDTree(centers)
    history:List[Tuple[int, int]] = []
    n = n_start
    rounds = int(math.log2(max(n_max//n_start, 1))) + 1
    for _ in tqdm(range(rounds), desc='overlap', disable=not progress):
        idx = rng.integers(0, len(centers), n)
        r = factor*dists[idx]*np.sqrt(rng.random(n))
        phi = 2*math.pi*rng.random(n)
        pts = centers[idx] + np.stack([r*np.cos(phi), r*np.sin(phi)], axis=1)
        pts = pts[inside(pts)]
        counts = _count_hits(pts, centers, dists, factor, distance(pts), tree)
        history.append((n, int(counts.max()) if len(counts) else 0))
        if len(history) >= 2 and history[-1][1] == history[-2][1]:
            break
        n *= 2
    return max(h[1] for h in history), history


def certify_coverage(covering:BallCovering, points:np.ndarray)->float:
    """Fraction of points inside at least one unstretched ball."""
    if len(points) == 0:
        return 1.0
    hits = _count_hits(points, covering.centers, covering.dists, covering.c,
                       covering.distance(points))
    return float(np.mean(hits > 0))


def _region_samples(region:Region, n:int, seed:int, floor:float)->np.ndarray:
    """Half area-uniform, half log-uniform in distance, all above `floor`."""
    half = n//2
    pts = np.vstack([region.sample(half, seed, 'area', floor),
                     region.sample(n - half, seed + 1, 'log', floor)])
    return pts[region.distance(pts) >= floor] if len(pts) else pts


def tail_sums(radii:np.ndarray, level:np.ndarray, deltas:Sequence[float],
              ratio_fn:Callable[[float], float])->Dict[float, TailSum]:
    """Level-wise partial sums of Σ R_i^δ. Level sums decay by ratio_fn(δ), so the
    sums are Cauchy when the ratio is below one; the remainder past the last
    level is estimated as a geometric series."""
    out:Dict[float, TailSum] = {}
    n_levels = int(level.max()) + 1 if len(level) else 0
    for delta in deltas:
        if not delta > 0:
            raise DomainError(f'delta={delta} must be positive')
        per_level = np.bincount(level, weights=radii**delta, minlength=n_levels) \
            if n_levels else np.zeros(0)
        partial = np.cumsum(per_level)
        q = ratio_fn(delta)
        last = float(per_level[-1]) if n_levels else 0.0
        tail = last*q/(1 - q) if q < 1 else math.inf
        out[float(delta)] = TailSum(float(delta), partial, q, tail, bool(q < 1))
    return out


def _finish(covering:BallCovering, samples:int, seed:int, progress:bool)->BallCovering:
    poly = covering.region.polygon
    covering.overlap_N, covering.overlap_history = certify_overlap(
        covering.centers, covering.dists, covering.c_hat, covering.distance, poly.contains,
        seed=seed, progress=progress)
    if samples > 0:
        pts = _region_samples(covering.region, samples, seed, covering.floor)
        covering.coverage, covering.n_samples = certify_coverage(covering, pts), len(pts)
    logger.info({'covering': covering.label, 'balls': len(covering), 'overlap_N': covering.overlap_N,
                 'coverage': covering.coverage}, exists_ok=True)
    return covering


def _empty(region:Region, kind:str, c:float, c_hat:float, c_tilde:float,
           deltas:Sequence[float])->BallCovering:
    cov = BallCovering(region, kind, np.zeros((0, 2)), np.zeros(0), np.zeros(0, dtype=int),
                       c, c_hat, c_tilde, coverage=1.0)
    cov.delta_tail = {float(d): TailSum(float(d), np.zeros(0), 0.0, 0.0, True) for d in deltas}
    return cov


@MeasureTime
def cover_vertex(region:VertexNbhd, c:float, c_hat:float, c_tilde:Optional[float]=None,
                 deltas:Sequence[float]=DEFAULT_DELTAS, samples:int=100_000, seed:int=0,
                 truncation:float=TRUNCATION, progress:bool=False)->BallCovering:
    """Balls B(x_i, c·|x_i - v|) covering ω_v.

    The shell ξ/2 ≤ r_v < ξ is covered by a greedy net and copied towards the
    vertex by dyadic scaling until radii fall below `truncation`. Raises
    ParameterError when a stretched ball B(x_i, c_hat·r_v(x_i)) would leave Ω.
    """
    c_tilde = 0.5*(c + c_hat) if c_tilde is None else c_tilde
    check_parameters(c, c_tilde, c_hat)
    if region.is_empty():
        return _empty(region, 'ball', c, c_hat, c_tilde, deltas)

    xi = region.xi
    radii = _geometric_levels(0.5*xi, xi*(1 - 1e-9), 1 + NET_SPACING*c)
    n_phi = int(math.ceil((region.phi_hi - region.phi_lo)/(NET_SPACING*c))) + 1
    phis = np.linspace(region.phi_lo, region.phi_hi, n_phi)
    rr, pp = np.meshgrid(radii, phis, indexing='ij')
    cands = region.polar(rr.ravel(), pp.ravel())
    keep = _greedy_net(cands, rr.ravel(), c)
    shell, shell_d = cands[keep], rr.ravel()[keep]

    vertex = region.frame.origin
    centers, dists, level = [], [], []
    k = 0
    while c*xi*2.0**-k >= truncation:
        centers.append(vertex + 2.0**-k*(shell - vertex))
        dists.append(2.0**-k*shell_d)
        level.append(np.full(len(shell), k))
        k += 1
    centers, dists, level = np.vstack(centers), np.concatenate(dists), np.concatenate(level)

    limit = float(np.min(region.polygon.boundary_distance(centers)/dists))
    if not c_hat < limit:
        raise ParameterError('c_hat', c_hat, (c_tilde, limit),
                             'stretched balls leave the domain')

    cov = BallCovering(region, 'ball', centers, dists, level, c, c_hat, c_tilde,
                       floor=xi*2.0**-k)
    cov.delta_tail = tail_sums(cov.radii, level, deltas, lambda d: 2.0**-d)
    return _finish(cov, samples, seed, progress)


def half_ball_limit(region:VertexEdgeNbhd, ts:np.ndarray)->float:
    """Largest stretch factor for which the balls of radius factor·t centered on
    the edge at distance t from the vertex meet Ω in half-balls."""
    theta = region.theta
    limit = math.sin(theta) if theta < 0.5*math.pi else 1.0
    poly, frame = region.polygon, region.frame
    others = [e for e in range(poly.n) if e != region.edge]
    pts = frame.to_world(ts, np.zeros_like(ts))
    d = poly.edge_distances(pts)[:, others].min(axis=1)
    return min(limit, float(np.min(d/ts)))


def _reference_subcovering(c:float, c1:float, c1_hat:float,
                           inner_depth:int)->BallCovering:
    """Balls B(x_j, c1·n_j) covering the half-disk of radius c above the line
    n = 0, with n_j the height of x_j."""
    floor = c*2.0**-inner_depth
    heights = _geometric_levels(floor, c, 1 + NET_SPACING*c1)
    cands, dists = [], []
    for n in heights:
        w = math.sqrt(max(c*c - n*n, 0.0))
        count = int(math.ceil(2*w/(NET_SPACING*c1*n))) + 1
        ts = np.linspace(-w, w, count)
        cands.append(np.stack([ts, np.full(count, n)], axis=1))
        dists.append(np.full(count, n))
    cands, dists = np.vstack(cands), np.concatenate(dists)
    keep = _greedy_net(cands, dists, c1)
    centers, d = cands[keep], dists[keep]
    level = np.floor(np.log2(c/d) + 1e-12).astype(int)
    return BallCovering(None, 'ball', centers, d, level, c1, c1_hat, 0.5*(c1 + c1_hat), floor=floor,
                        distance_fn=_height)


def _half_disk_samples(c:float, floor:float, n:int, seed:int)->np.ndarray:
    rng = make_rng(seed)
    r = c*np.sqrt(rng.random(n))
    phi = math.pi*rng.random(n)
    pts = np.stack([r*np.cos(phi), r*np.sin(phi)], axis=1)
    return pts[pts[:, 1] >= floor]


def _height(points:np.ndarray)->np.ndarray:
    return points[:, 1]


@MeasureTime
def cover_vertex_edge(region:VertexEdgeNbhd, c:float, c_hat:float, c_tilde:Optional[float]=None,
                      c1:float=0.25, c1_hat:float=0.35, inner_depth:int=6,
                      deltas:Sequence[float]=DEFAULT_DELTAS, samples:int=100_000,
                      sub_samples:int=10_000, seed:int=0, truncation:float=TRUNCATION,
                      progress:bool=False)->VertexEdgeCovering:
    """Half-balls H_i = B(x_i, c·t_i) ∩ Ω with x_i on the edge at distance t_i
    from the vertex, and inside each H_i balls B(x_ij, c1·r_e(x_ij)) whose
    stretched versions stay in H̃_i = B(x_i, c_tilde·t_i) ∩ Ω.

    t_i = ξ q^i, where q is the smallest ratio for which B(x_i, 0.85·c·t_i)
    contains ω_ve between t_{i+1} and t_i; this needs 0.85·c > ξ.
    """
    c_tilde = 0.5*(c + c_hat) if c_tilde is None else c_tilde
    check_parameters(c, c_tilde, c_hat)
    check_parameters(c1, 0.5*(c1 + c1_hat), c1_hat)
    if not c*(1 + c1_hat) < c_tilde:
        raise ParameterError('c_tilde', c_tilde, (c*(1 + c1_hat), c_hat),
                             'stretched sub-balls must stay inside the intermediate half-ball')

    ref = _reference_subcovering(c, c1, c1_hat, inner_depth)
    containment = bool(np.all(np.linalg.norm(ref.centers, axis=1) + c1_hat*ref.dists <= c_tilde))
    ref.overlap_N, ref.overlap_history = certify_overlap(
        ref.centers, ref.dists, c1_hat, _height, lambda p: p[:, 1] > 0, seed=seed, progress=progress)
    if sub_samples > 0:
        pts = _half_disk_samples(c, ref.floor, sub_samples, seed)
        hits = _count_hits(pts, ref.centers, ref.dists, c1, _height(pts))
        ref.coverage, ref.n_samples = float(np.mean(hits > 0)), len(pts)

    if region.is_empty():
        outer = _empty(region, 'half-ball', c, c_hat, c_tilde, deltas)
        return VertexEdgeCovering(outer, ref, c1, c1_hat, containment)

    xi = region.xi
    c_eff = 0.85*c
    if not c_eff > xi:
        raise ParameterError('c', c, (xi/0.85, 0.5), 'half-balls cannot reach the edge of the sector')
    m2 = xi*xi/(1 - xi*xi)
    q = (1 - math.sqrt(c_eff**2 - m2*(1 - c_eff**2)))/(1 + m2)

    count = int(math.floor(math.log(truncation/(c*xi))/math.log(q))) + 1
    ts = xi*q**np.arange(count)
    limit = half_ball_limit(region, ts)
    if not (c_hat < limit and 2*c < limit):
        raise ParameterError('c_hat', c_hat, (c_tilde, limit),
                             'balls around the edge points do not meet the domain in half-balls')

    frame = region.frame
    centers = frame.to_world(ts, np.zeros_like(ts))
    outer = BallCovering(region, 'half-ball', centers, ts, np.arange(count), c, c_hat, c_tilde,
                         floor=ts[-1], level_ratio=q)
    outer.delta_tail = tail_sums(outer.radii, outer.level, deltas, lambda d: q**d)
    outer = _finish(outer, samples, seed, progress)

    # world-coordinate check of B̂_ij ⊂ H̃_i for every half-ball
    tt, nn = ref.centers[:, 0], ref.centers[:, 1]
    offsets = np.outer(tt, frame.tangent) + np.outer(nn, frame.normal)
    for i in range(count):
        sub = centers[i] + ts[i]*offsets
        r_e = region.edge_distance(sub)
        far = np.linalg.norm(sub - centers[i], axis=1) + c1_hat*r_e
        containment &= bool(np.all(far <= c_tilde*ts[i]*(1 + 1e-12)))
    return VertexEdgeCovering(outer, ref, c1, c1_hat, containment)


@MeasureTime
def cover_edge(region:EdgeNbhd, c:float, c_hat:float, c_tilde:Optional[float]=None,
               depth:int=5, deltas:Sequence[float]=EDGE_DELTAS, samples:int=100_000, seed:int=0,
               progress:bool=False)->BallCovering:
    """Balls B(x_i, c·r_e(x_i)) covering the part of ω_e at distance at least
    width·2^-depth from the edge.

    Rows sit at heights n_j = n_0 q^j, q = (1-a)/(1+a) with a = 0.9c/√2, and each
    ball contains the square of half-side a·n_j around its center; the squares
    tile the strip row by row. Row sums of R_i^δ scale like q^{(δ-1)j}, so the
    tails converge only for δ > 1. The default reports δ = 1 next to δ = 1.5,
    with the δ = 1 tail marked divergent.
    """
    c_tilde = 0.5*(c + c_hat) if c_tilde is None else c_tilde
    check_parameters(c, c_tilde, c_hat)
    if depth < 0:
        raise DomainError(f'depth={depth} must be non-negative')
    if region.is_empty():
        return _empty(region, 'ball', c, c_hat, c_tilde, deltas)

    a = 0.9*c/math.sqrt(2)
    q = (1 - a)/(1 + a)
    floor = region.width*2.0**-depth
    frame = region.frame
    centers, dists, level = [], [], []
    n_j, j = region.width/(1 + a), 0
    while n_j*(1 + a) > floor:
        lo, hi = region.t_range(n_j*(1 + a))
        if hi <= lo:
            n_j, j = n_j*q, j + 1
            continue
        m = max(int(math.ceil((hi - lo)/(2*a*n_j))), 1)
        ts = lo + a*n_j*(2*np.arange(m) + 1)
        centers.append(frame.to_world(ts, np.full(m, n_j)))
        dists.append(np.full(m, n_j))
        level.append(np.full(m, j))
        n_j, j = n_j*q, j + 1
    if not centers:
        return _empty(region, 'ball', c, c_hat, c_tilde, deltas)
    centers, dists, level = np.vstack(centers), np.concatenate(dists), np.concatenate(level)

    limit = float(np.min(region.polygon.boundary_distance(centers)/dists))
    if not c_hat < limit:
        raise ParameterError('c_hat', c_hat, (c_tilde, limit), 'stretched balls leave the domain')

    cov = BallCovering(region, 'ball', centers, dists, level, c, c_hat, c_tilde, floor=floor,
                       level_ratio=q)
    cov.delta_tail = tail_sums(cov.radii, level, deltas, lambda d: q**(d - 1))
    return _finish(cov, samples, seed, progress)


def radius_distance_constant(covering:BallCovering, n:int=4096, seed:int=0)->float:
    """Measured C_B with C_B⁻¹ R_i ≤ dist(x) ≤ C_B R_i for x in the stretched ball
    of item i (R_i the unstretched radius)."""
    if covering.is_empty:
        return 1.0
    rng = make_rng(seed)
    idx = rng.integers(0, len(covering), n)
    r = covering.stretched_radii[idx]*np.sqrt(rng.random(n))
    phi = 2*math.pi*rng.random(n)
    pts = covering.centers[idx] + np.stack([r*np.cos(phi), r*np.sin(phi)], axis=1)
    d = covering.distance(pts)
    R = covering.radii[idx]
    with np.errstate(divide='ignore'):
        return float(np.max(np.maximum(R/d, d/R)))


def write_covering_csv(filepath:str, header:ArtifactHeader, coverings:Sequence[BallCovering])->str:
    rows = [row for cov in coverings for row in cov.rows()]
    return write_csv(filepath, header, ['kind', 'cx', 'cy', 'R', 'level'], rows)


def write_certificate(filepath:str, header:ArtifactHeader, certificates:Dict[str, Dict])->str:
    return write_json(filepath, header, {'coverings': certificates})
