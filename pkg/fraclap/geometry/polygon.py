# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Simple polygons with straight edges, their distance functions and presets.

Vertices are stored counter-clockwise; edge k joins vertex k to vertex k+1
(mod n), so the interior lies to the left of every edge.
"""

import json
import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..common.errors import ConfigError, DomainError
from ..common.utils import as_points


def segment_distance(points:np.ndarray, a:np.ndarray, b:np.ndarray)->np.ndarray:
    """Distance from each point to the closed segment [a, b]."""
    d = b - a
    t = np.clip(((points - a) @ d) / float(d @ d), 0.0, 1.0)
    proj = a + t[:, None]*d
    return np.linalg.norm(points - proj, axis=1)

def _cross(u:np.ndarray, v:np.ndarray):
    return u[..., 0]*v[..., 1] - u[..., 1]*v[..., 0]

def _segments_intersect(p1, p2, q1, q2)->bool:
    d1, d2 = _cross(q2 - q1, p1 - q1), _cross(q2 - q1, p2 - q1)
    d3, d4 = _cross(p2 - p1, q1 - p1), _cross(p2 - p1, q2 - p1)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1*d2 != 0 and d3*d4 != 0:
        return True
    # touching or collinear overlap
    for p, a, b, d in ((p1, q1, q2, d1), (p2, q1, q2, d2), (q1, p1, p2, d3), (q2, p1, p2, d4)):
        if d == 0 and segment_distance(p[None, :], a, b)[0] == 0.0:
            return True
    return False

def segment_segment_distance(p1, p2, q1, q2)->float:
    if _segments_intersect(p1, p2, q1, q2):
        return 0.0
    return float(min(segment_distance(p1[None, :], q1, q2)[0], segment_distance(p2[None, :], q1, q2)[0],
                     segment_distance(q1[None, :], p1, p2)[0], segment_distance(q2[None, :], p1, p2)[0]))


class Polygon:
    def __init__(self, vertices:Sequence[Sequence[float]], name:str='') -> None:
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise DomainError('a polygon needs at least three 2D vertices')
        if not np.all(np.isfinite(v)):
            raise DomainError('polygon vertices must be finite')
        if np.any(np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1) == 0.0):
            raise DomainError('polygon has repeated consecutive vertices')
        if _signed_area(v) < 0:
            v = v[::-1].copy()
        self.vertices = v
        self.vertices.setflags(write=False)
        self.name = name
        self._validate()

    # region structure
    @property
    def n(self)->int:
        return len(self.vertices)

    @property
    def edges(self)->List[Tuple[int, int]]:
        return [(k, (k + 1) % self.n) for k in range(self.n)]

    def edge_points(self, e:int)->Tuple[np.ndarray, np.ndarray]:
        return self.vertices[e], self.vertices[(e + 1) % self.n]

    def edge_length(self, e:int)->float:
        a, b = self.edge_points(e)
        return float(np.linalg.norm(b - a))

    def edge_tangent(self, e:int)->np.ndarray:
        a, b = self.edge_points(e)
        return (b - a) / np.linalg.norm(b - a)

    def edge_normal(self, e:int)->np.ndarray:
        """Unit normal pointing into the polygon."""
        t = self.edge_tangent(e)
        return np.array([-t[1], t[0]])

    def edges_at(self, v:int)->Tuple[int, int]:
        """(incoming edge, outgoing edge) of vertex v."""
        return (v - 1) % self.n, v

    def vertices_of(self, e:int)->Tuple[int, int]:
        return e, (e + 1) % self.n

    def interior_angle(self, v:int)->float:
        """Angle at v swept counter-clockwise from the outgoing to the incoming edge."""
        p = self.vertices[v]
        d_next = self.vertices[(v + 1) % self.n] - p
        d_prev = self.vertices[(v - 1) % self.n] - p
        ang = math.atan2(float(_cross(d_next, d_prev)), float(d_next @ d_prev))
        return ang % (2*math.pi)

    @property
    def angles(self)->np.ndarray:
        return np.array([self.interior_angle(v) for v in range(self.n)])
    # endregion

    # region measurements
    @property
    def area(self)->float:
        return _signed_area(self.vertices)

    @property
    def bbox(self)->Tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    @property
    def diameter(self)->float:
        v = self.vertices
        return float(np.max(np.linalg.norm(v[:, None, :] - v[None, :, :], axis=2)))

    @property
    def min_edge_length(self)->float:
        return min(self.edge_length(e) for e in range(self.n))

    @property
    def min_vertex_separation(self)->float:
        v = self.vertices
        d = np.linalg.norm(v[:, None, :] - v[None, :, :], axis=2)
        return float(np.min(d[~np.eye(self.n, dtype=bool)]))

    def nonadjacent_edge_distance(self)->float:
        """Smallest distance between two edges sharing no vertex (inf for triangles)."""
        best = math.inf
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if j == i + 1 or (i == 0 and j == self.n - 1):
                    continue
                best = min(best, segment_segment_distance(*self.edge_points(i), *self.edge_points(j)))
        return best
    # endregion

    # region point queries
    def edge_distances(self, points)->np.ndarray:
        """(m, n_edges) distances to the closed edges."""
        pts = as_points(points, 2)
        return np.stack([segment_distance(pts, *self.edge_points(e)) for e in range(self.n)], axis=1)

    def vertex_distances(self, points)->np.ndarray:
        pts = as_points(points, 2)
        return np.linalg.norm(pts[:, None, :] - self.vertices[None, :, :], axis=2)

    def boundary_distance(self, points)->np.ndarray:
        return self.edge_distances(points).min(axis=1)

    def contains(self, points)->np.ndarray:
        """Membership in the open polygon (even-odd ray casting, boundary excluded)."""
        pts = as_points(points, 2)
        x, y = pts[:, 0:1], pts[:, 1:2]
        a = self.vertices
        b = np.roll(a, -1, axis=0)
        ax, ay, bx, by = a[:, 0], a[:, 1], b[:, 0], b[:, 1]
        straddle = (ay > y) != (by > y)
        with np.errstate(divide='ignore', invalid='ignore'):
            x_cross = ax + (y - ay)*(bx - ax)/(by - ay)
        inside = np.sum(straddle & (x < x_cross), axis=1) % 2 == 1
        on_boundary = self.boundary_distance(pts) <= 1e-14*self.diameter
        return inside & ~on_boundary

    def check_closure(self, points, tol:float=1e-12)->np.ndarray:
        """Points as (m, 2); raises DomainError if any lies strictly outside the closure."""
        pts = as_points(points, 2)
        outside = ~self.contains(pts) & (self.boundary_distance(pts) > tol*self.diameter)
        if np.any(outside):
            raise DomainError(f'point {pts[np.argmax(outside)].tolist()} lies outside the closed polygon')
        return pts
    # endregion

    def triangulate(self)->np.ndarray:
        """Ear clipping; returns (n-2, 3) vertex indices of counter-clockwise triangles."""
        idx = list(range(self.n))
        v = self.vertices
        tris = []
        guard = 0
        while len(idx) > 3:
            guard += 1
            if guard > 10*self.n*self.n:
                raise DomainError('ear clipping failed, polygon is degenerate')
            for k in range(len(idx)):
                i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % len(idx)]
                a, b, c = v[i0], v[i1], v[i2]
                if _cross(b - a, c - b) <= 0:
                    continue
                others = [j for j in idx if j not in (i0, i1, i2)]
                if others and np.any(_in_triangle(v[others], a, b, c)):
                    continue
                tris.append((i0, i1, i2))
                del idx[k]
                break
        tris.append(tuple(idx))
        return np.array(tris, dtype=int)

    def _validate(self)->None:
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if j == i + 1 or (i == 0 and j == self.n - 1):
                    continue
                if _segments_intersect(*self.edge_points(i), *self.edge_points(j)):
                    raise DomainError(f'polygon is not simple: edges {i} and {j} intersect')
        for v, ang in enumerate(self.angles):
            if not 1e-12 < ang < 2*math.pi - 1e-12:
                raise DomainError(f'polygon has a cusp or slit at vertex {v} (angle {ang})')

    def to_dict(self)->Dict:
        return {'vertices': self.vertices.tolist()}

    @staticmethod
    def from_dict(d:Dict, name:str='')->'Polygon':
        if 'vertices' not in d:
            raise ConfigError('polygon description needs a "vertices" list')
        return Polygon(d['vertices'], name=name)

    def __repr__(self)->str:
        return f'Polygon({self.name or self.n})'


def _signed_area(v:np.ndarray)->float:
    w = np.roll(v, -1, axis=0)
    return 0.5*float(np.sum(v[:, 0]*w[:, 1] - w[:, 0]*v[:, 1]))

def _in_triangle(p:np.ndarray, a, b, c)->np.ndarray:
    d1 = _cross(b - a, p - a)
    d2 = _cross(c - b, p - b)
    d3 = _cross(a - c, p - c)
    return (d1 >= 0) & (d2 >= 0) & (d3 >= 0)

def load_polygon(filepath:str)->Polygon:
    """Reads {"vertices": [[x, y], ...]} from a JSON file."""
    try:
        with open(filepath, 'r') as f:
            d = json.load(f)
    except (OSError, ValueError) as e:
        raise ConfigError(f'cannot read polygon file "{filepath}": {e}') from e
    return Polygon.from_dict(d, name=filepath)

def save_polygon(polygon:Polygon, filepath:str)->None:
    with open(filepath, 'w') as f:
        json.dump(polygon.to_dict(), f, indent=2)


@dataclass
class Distances:
    """Distance functions at m points: r_v (m, n_vertices), r_e (m, n_edges) and
    rho (m, n_vertices, 2), the ratio r_e/r_v for the (incoming, outgoing) edges
    of each vertex, +inf where r_v = 0."""
    r_v: np.ndarray
    r_e: np.ndarray
    rho: np.ndarray
    polygon: Polygon

    def rho_ve(self, v:int, e:int)->np.ndarray:
        incoming, outgoing = self.polygon.edges_at(v)
        if e not in (incoming, outgoing):
            raise DomainError(f'edge {e} does not meet vertex {v}')
        return self.rho[:, v, 0 if e == incoming else 1]


def distances(polygon:Polygon, x)->Distances:
    pts = polygon.check_closure(x)
    r_v = polygon.vertex_distances(pts)
    r_e = polygon.edge_distances(pts)
    rho = np.empty((len(pts), polygon.n, 2))
    for v in range(polygon.n):
        for k, e in enumerate(polygon.edges_at(v)):
            with np.errstate(divide='ignore', invalid='ignore'):
                rho[:, v, k] = np.where(r_v[:, v] > 0, r_e[:, e]/np.where(r_v[:, v] > 0, r_v[:, v], 1.0), np.inf)
    return Distances(r_v, r_e, rho, polygon)


# region presets
def unit_square()->Polygon:
    return Polygon([[0, 0], [1, 0], [1, 1], [0, 1]], name='square')

def l_shape()->Polygon:
    """(0,1)² without [1/2, 1)²; the re-entrant corner sits at (1/2, 1/2)."""
    return Polygon([[0, 0], [1, 0], [1, 0.5], [0.5, 0.5], [0.5, 1], [0, 1]], name='lshape')

def sector(angle:float, radius:float=1.0, arc_points:int=3)->Polygon:
    """Vertex at the origin with opening `angle`, the arc replaced by a polyline."""
    if not 0 < angle < 2*math.pi:
        raise DomainError(f'sector angle {angle} must lie in (0, 2π)')
    phis = np.linspace(0.0, angle, arc_points + 2)
    pts = [[0.0, 0.0]] + [[radius*math.cos(p), radius*math.sin(p)] for p in phis]
    return Polygon(pts, name=f'sector{math.degrees(angle):.0f}')

def quarter_plane(size:float=4.0)->Polygon:
    """Reference right-angle corner at the origin, truncated to a square far away."""
    return Polygon([[0, 0], [size, 0], [size, size], [0, size]], name='quarter_plane')

PRESETS = {'square': unit_square, 'lshape': l_shape,
           'sector': lambda angle=0.75*math.pi: sector(angle),
           'quarter_plane': quarter_plane}

def make_polygon(kind:str, **kwargs)->Polygon:
    if kind not in PRESETS:
        raise ConfigError(f'unknown domain kind "{kind}", expected one of {sorted(PRESETS)}')
    return PRESETS[kind](**kwargs)
# endregion
