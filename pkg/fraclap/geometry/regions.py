# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Vertex, vertex-edge, edge and interior neighborhoods of a polygon.

Each region evaluates its defining inequalities exactly; `sample` draws
scrambled Sobol points in a local parametrization that fits the region and
keeps the ones inside it.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
import math
from typing import Optional

import numpy as np
from overrides import EnforceOverrides, overrides
from scipy.stats import qmc

from ..common.errors import DomainError
from ..common.utils import as_points
from .polygon import Polygon, segment_distance


@dataclass(frozen=True)
class RegionFrame:
    """Local coordinates: origin (vertex, or first endpoint of the edge), unit
    tangent of the reference edge and inward normal; `angle` is the opening
    angle at the vertex, `length` the edge length."""
    origin: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    angle: Optional[float] = None
    length: Optional[float] = None

    def to_world(self, t:np.ndarray, n:np.ndarray)->np.ndarray:
        return self.origin + np.outer(t, self.tangent) + np.outer(n, self.normal)


def _sobol(n:int, seed:int, dim:int=2)->np.ndarray:
    m = max(1, int(math.ceil(math.log2(max(n, 2)))))
    return qmc.Sobol(d=dim, scramble=True, seed=seed).random_base2(m)[:n]


class Region(ABC, EnforceOverrides):
    kind = ''
    floor = 0.0

    def __init__(self, polygon:Polygon, xi:float) -> None:
        if not xi > 0:
            raise DomainError(f'xi={xi} must be positive')
        self.polygon, self.xi = polygon, float(xi)

    @property
    @abstractmethod
    def label(self)->str:
        pass

    @property
    @abstractmethod
    def frame(self)->RegionFrame:
        pass

    @abstractmethod
    def contains(self, points)->np.ndarray:
        """Exact membership by the defining inequalities (and the open polygon)."""

    @abstractmethod
    def area(self)->float:
        pass

    @abstractmethod
    def _draw(self, n:int, seed:int, radial:str, floor:float)->np.ndarray:
        """About n candidate points in a parametrization covering the region,
        at distance at least `floor` from its vertex or edge."""

    def distance(self, points)->np.ndarray:
        """Distance to the part of the boundary the region is refined towards."""
        return self.polygon.boundary_distance(points)

    def is_empty(self)->bool:
        return self.area() <= 0.0

    def sample(self, n:int, seed:int=0, radial:str='area', floor:Optional[float]=None)->np.ndarray:
        """n quasi-random points of the region (none if it is empty).
        radial='log' spreads points evenly in log distance, reaching deep
        towards the vertex or edge; `floor` overrides the region's own cutoff."""
        floor = self.floor if floor is None else floor
        if n <= 0 or self.is_empty():
            return np.zeros((0, 2))
        out = np.zeros((0, 2))
        draw, attempt = n, 0
        while len(out) < n:
            pts = self._draw(draw, seed + 7919*attempt, radial, floor)
            out = np.vstack([out, pts[self.contains(pts)]])
            attempt += 1
            if attempt > 20:
                raise DomainError(f'region {self.label} rejects almost all samples')
            draw *= 2
        return out[:n]


class VertexNbhd(Region):
    """ω_v: r_v < ξ and r_e/r_v ≥ ξ for both edges at v."""
    kind = 'vertex'

    def __init__(self, polygon:Polygon, vertex:int, xi:float, floor:float=0.0) -> None:
        super().__init__(polygon, xi)
        self.vertex = vertex
        self.theta = polygon.interior_angle(vertex)
        self.floor = floor
        # angular band measured from the outgoing edge
        self.phi_lo = math.asin(self.xi) if self.xi < 1 else math.inf
        self.phi_hi = self.theta - self.phi_lo

    @property
    @overrides
    def label(self)->str:
        return f'v{self.vertex}'

    @property
    @overrides
    def frame(self)->RegionFrame:
        _, out_edge = self.polygon.edges_at(self.vertex)
        return RegionFrame(self.polygon.vertices[self.vertex].copy(), self.polygon.edge_tangent(out_edge),
                           self.polygon.edge_normal(out_edge), self.theta)

    @overrides
    def distance(self, points)->np.ndarray:
        return np.linalg.norm(as_points(points, 2) - self.polygon.vertices[self.vertex], axis=1)

    @overrides
    def contains(self, points)->np.ndarray:
        pts = as_points(points, 2)
        r_v = self.distance(pts)
        ok = self.polygon.contains(pts) & (r_v < self.xi)
        for e in self.polygon.edges_at(self.vertex):
            r_e = segment_distance(pts, *self.polygon.edge_points(e))
            with np.errstate(divide='ignore', invalid='ignore'):
                ok &= (r_v == 0) | (r_e >= self.xi*r_v)
        return ok

    @overrides
    def area(self)->float:
        width = self.phi_hi - self.phi_lo
        return 0.5*self.xi**2*width if width > 0 else 0.0

    def polar(self, r:np.ndarray, phi:np.ndarray)->np.ndarray:
        f = self.frame
        return f.to_world(r*np.cos(phi), r*np.sin(phi))

    @overrides
    def _draw(self, n:int, seed:int, radial:str, floor:float)->np.ndarray:
        u = _sobol(n, seed)
        r = _radii(u[:, 0], self.xi, floor, radial)
        phi = self.phi_lo + (self.phi_hi - self.phi_lo)*u[:, 1]
        return self.polar(r, phi)


class VertexEdgeNbhd(Region):
    """ω_ve: r_v < ξ and r_e/r_v < ξ."""
    kind = 'vertex_edge'

    def __init__(self, polygon:Polygon, vertex:int, edge:int, xi:float, floor:float=0.0) -> None:
        super().__init__(polygon, xi)
        if edge not in polygon.edges_at(vertex):
            raise DomainError(f'edge {edge} does not meet vertex {vertex}')
        self.vertex, self.edge = vertex, edge
        self.theta = polygon.interior_angle(vertex)
        self.floor = floor
        self.phi_max = min(math.asin(min(self.xi, 1.0)), self.theta)

    @property
    @overrides
    def label(self)->str:
        return f'v{self.vertex}e{self.edge}'

    @property
    def outgoing(self)->bool:
        return self.edge == self.polygon.edges_at(self.vertex)[1]

    @property
    @overrides
    def frame(self)->RegionFrame:
        """Tangent points from the vertex along the edge; normal points inward."""
        tangent = self.polygon.edge_tangent(self.edge)
        normal = self.polygon.edge_normal(self.edge)
        if not self.outgoing:
            tangent = -tangent
        return RegionFrame(self.polygon.vertices[self.vertex].copy(), tangent, normal, self.theta,
                           self.polygon.edge_length(self.edge))

    @overrides
    def distance(self, points)->np.ndarray:
        return np.linalg.norm(as_points(points, 2) - self.polygon.vertices[self.vertex], axis=1)

    def edge_distance(self, points)->np.ndarray:
        return segment_distance(as_points(points, 2), *self.polygon.edge_points(self.edge))

    @overrides
    def contains(self, points)->np.ndarray:
        pts = as_points(points, 2)
        r_v = self.distance(pts)
        r_e = self.edge_distance(pts)
        return self.polygon.contains(pts) & (r_v < self.xi) & (r_v > 0) & (r_e < self.xi*r_v)

    @overrides
    def area(self)->float:
        return 0.5*self.xi**2*self.phi_max

    @overrides
    def _draw(self, n:int, seed:int, radial:str, floor:float)->np.ndarray:
        u = _sobol(n, seed)
        r = _radii(u[:, 0], self.xi, floor, radial)
        phi = self.phi_max*u[:, 1]
        f = self.frame
        return f.to_world(r*np.cos(phi), r*np.sin(phi))


class EdgeNbhd(Region):
    """ω_e: r_v ≥ ξ at both endpoints and r_e < width (ξ² unless overridden)."""
    kind = 'edge'

    def __init__(self, polygon:Polygon, edge:int, xi:float, width:Optional[float]=None,
                 floor:float=0.0) -> None:
        super().__init__(polygon, xi)
        self.edge = edge
        self.width = self.xi**2 if width is None else float(width)
        if not 0 < self.width <= self.xi:
            raise DomainError(f'edge neighborhood width {self.width} must lie in (0, xi]')
        self.length = polygon.edge_length(edge)
        self.floor = floor

    @property
    @overrides
    def label(self)->str:
        return f'e{self.edge}'

    @property
    @overrides
    def frame(self)->RegionFrame:
        a, _ = self.polygon.edge_points(self.edge)
        return RegionFrame(a.copy(), self.polygon.edge_tangent(self.edge),
                           self.polygon.edge_normal(self.edge), None, self.length)

    @overrides
    def distance(self, points)->np.ndarray:
        return segment_distance(as_points(points, 2), *self.polygon.edge_points(self.edge))

    def t_range(self, n:np.ndarray):
        """Tangential extent of the region at normal distance n."""
        half = np.sqrt(np.clip(self.xi**2 - np.asarray(n)**2, 0.0, None))
        return half, self.length - half

    @overrides
    def contains(self, points)->np.ndarray:
        pts = as_points(points, 2)
        ok = self.polygon.contains(pts) & (self.distance(pts) < self.width)
        for v in self.polygon.vertices_of(self.edge):
            ok &= np.linalg.norm(pts - self.polygon.vertices[v], axis=1) >= self.xi
        return ok

    @overrides
    def area(self)->float:
        w, xi, L = self.width, self.xi, self.length
        # below height lo the two end disks overlap across the whole edge
        lo = math.sqrt(xi**2 - 0.25*L**2) if L < 2*xi else 0.0
        if w <= lo:
            return 0.0
        F = lambda n: L*n - n*math.sqrt(max(xi**2 - n**2, 0.0)) - xi**2*math.asin(min(n/xi, 1.0))
        return F(w) - F(lo)

    @overrides
    def _draw(self, n:int, seed:int, radial:str, floor:float)->np.ndarray:
        u = _sobol(n, seed)
        nn = _radii(u[:, 0], self.width, floor, radial, area=False)
        lo, hi = self.t_range(nn)
        t = lo + (hi - lo)*u[:, 1]
        return self.frame.to_world(t, nn)


class Interior(Region):
    """Points of Ω claimed by no vertex, vertex-edge or edge neighborhood."""
    kind = 'interior'

    def __init__(self, polygon:Polygon, xi:float, others) -> None:
        super().__init__(polygon, xi)
        self.others = list(others)

    @property
    @overrides
    def label(self)->str:
        return 'interior'

    @property
    @overrides
    def frame(self)->RegionFrame:
        return RegionFrame(np.mean(self.polygon.vertices, axis=0), np.array([1.0, 0.0]),
                           np.array([0.0, 1.0]))

    @overrides
    def contains(self, points)->np.ndarray:
        pts = as_points(points, 2)
        ok = self.polygon.contains(pts)
        for r in self.others:
            ok &= ~r.contains(pts)
        return ok

    @overrides
    def area(self)->float:
        return max(self.polygon.area - sum(r.area() for r in self.others), 0.0)

    @overrides
    def _draw(self, n:int, seed:int, radial:str, floor:float)->np.ndarray:
        lo, hi = self.polygon.bbox
        return lo + (hi - lo)*_sobol(n, seed)


def _radii(u:np.ndarray, r_max:float, floor:float, radial:str, area:bool=True)->np.ndarray:
    """Map uniform u to distances in (floor, r_max): area-uniform (r ∝ sqrt) for
    polar regions, uniform for strips, or log-uniform."""
    if radial == 'log':
        lo = floor if floor > 0 else r_max*1e-6
        return lo*(r_max/lo)**u
    if radial != 'area':
        raise DomainError(f'unknown radial sampling "{radial}"')
    if area:
        return np.sqrt(floor**2 + (r_max**2 - floor**2)*u)
    return floor + (r_max - floor)*u
