# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Weighted derivative norms over the neighborhoods of a polygon.

    vertex       ‖r_v^{p-1/2-s+ε} ∂^β u‖ on ω_v, the max over |β| = p
    vertex_edge  ‖r_e^{p⊥-1/2-s+ε} r_v^{p∥+ε} D⊥^{p⊥} D∥^{p∥} u‖ on ω_ve
    edge         ‖r_e^{p⊥-1/2-s+ε} D⊥^{p⊥} D∥^{p∥} u‖ on ω_e
    interior     ‖∂^β u‖ on Ω_int, the max over |β| = p

Each region is parametrized by a radial (or normal) panel ladder towards its
vertex or edge; ω_ve has a second ladder in the angle towards the edge. A
VertexInterval is the one dimensional analog of ω_v.
"""

from dataclasses import dataclass
import math
from typing import ClassVar, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..common.common import logger
from ..common.errors import DivergenceError, DomainError
from ..fields.scalar_field import ScalarField
from ..fracops.quadrature import composite_gauss
from ..geometry.regions import EdgeNbhd, Interior, Region, VertexEdgeNbhd, VertexNbhd
from .ladder import ladder, ladder_total


@dataclass(frozen=True)
class NormSpec:
    """Row index of a weighted norm: total order p, or the split p = p⊥ + p∥
    for edge and vertex-edge rows."""
    p: int
    epsilon: float
    s: float
    p_perp: Optional[int] = None
    p_par: Optional[int] = None

    def __post_init__(self) -> None:
        if not 0.0 < self.s < 1.0:
            raise DomainError(f's={self.s} must lie in (0, 1)')
        if self.p < 0:
            raise DomainError(f'derivative order p={self.p} must be nonnegative')
        if (self.p_perp is None) != (self.p_par is None):
            raise DomainError('p_perp and p_par go together')
        if self.is_split and (min(self.p_perp, self.p_par) < 0 or self.p_perp + self.p_par != self.p):
            raise DomainError(f'split ({self.p_perp}, {self.p_par}) does not add up to p={self.p}')
        if not math.isfinite(self.epsilon):
            raise DomainError(f'epsilon={self.epsilon} must be finite')

    @staticmethod
    def split(p_perp:int, p_par:int, epsilon:float, s:float)->'NormSpec':
        return NormSpec(p_perp + p_par, epsilon, s, p_perp, p_par)

    @property
    def is_split(self)->bool:
        return self.p_perp is not None

    def with_epsilon(self, epsilon:float)->'NormSpec':
        return NormSpec(self.p, epsilon, self.s, self.p_perp, self.p_par)


@dataclass(frozen=True)
class NormQuadrature:
    n_panels: int = 30           # radial or normal ladder
    n_gauss: int = 8
    n_angle: int = 24            # Gauss points across an angular band or along an edge
    n_angle_panels: int = 24     # angular ladder of ω_ve
    n_interior: int = 4096
    seed: int = 0
    min_exponent: float = 1e-6
    # panel sums of Galerkin functions are trusted down to this many mesh
    # scales, and their decay exponent is resolved to this accuracy
    resolved_scales: float = 16.0
    discrete_min_exponent: float = 0.05


DEFAULT_QUADRATURE = NormQuadrature()


@dataclass(frozen=True)
class VertexInterval:
    """Points vertex + side·r with 0 < r < length."""
    vertex: float
    length: float
    side: int = 1
    kind: ClassVar[str] = 'vertex'

    def __post_init__(self) -> None:
        if not self.length > 0:
            raise DomainError(f'interval length {self.length} must be positive')
        if self.side not in (1, -1):
            raise DomainError('side must be +1 or -1')

    @property
    def label(self)->str:
        return f'x{self.vertex:g}' + ('' if self.side > 0 else '-')

    def distance(self, x)->np.ndarray:
        return np.abs(np.asarray(x, dtype=float).ravel() - self.vertex)

    def contains(self, x)->np.ndarray:
        r = self.side*(np.asarray(x, dtype=float).ravel() - self.vertex)
        return (r > 0) & (r < self.length)


TRegion = Union[Region, VertexInterval]


@dataclass
class _Grid:
    """Quadrature points of a region laid out as (outer panel, outer gauss,
    inner panel, inner gauss), with base weights (Jacobian included) and the
    vertex and edge distances at every point."""
    points: np.ndarray
    shape: Tuple[int, int, int, int]
    weights: np.ndarray
    r_v: Optional[np.ndarray]
    r_e: Optional[np.ndarray]
    outer_singular: bool
    inner_singular: bool = False

    def integrate(self, values:np.ndarray, exp_v:float, exp_e:float,
                  min_exponent:float)->float:
        w = self.weights
        if exp_v and self.r_v is not None:
            w = w*self.r_v**(2.0*exp_v)
        if exp_e and self.r_e is not None:
            w = w*self.r_e**(2.0*exp_e)
        arr = (w*values).reshape(self.shape)
        inner = arr.sum(axis=3)
        if self.inner_singular:
            inner, diverged = ladder_total(inner, True, min_exponent)
            if np.any(diverged):
                return math.inf
        else:
            inner = inner.sum(axis=2)
        total, _ = ladder_total(inner.sum(axis=1), self.outer_singular, min_exponent)
        return float(total)


def _broadcast(*arrays):
    return [np.ascontiguousarray(a).ravel() for a in np.broadcast_arrays(*arrays)]

def _angle_rule(lo:float, hi:float, n:int)->Tuple[np.ndarray, np.ndarray]:
    return composite_gauss(np.linspace(lo, hi, 3), max(1, n//2))

def _interval_grid(region:VertexInterval, quad:NormQuadrature, lo:float, hi:float,
                   stop:float)->_Grid:
    lad = ladder(hi, lo, quad.n_panels, quad.n_gauss, stop)
    P, G = lad.nodes.shape
    r = lad.nodes.ravel()
    pts = (region.vertex + region.side*r)[:, None]
    return _Grid(pts, (P, G, 1, 1), lad.weights.ravel(), r, None, lad.singular)

def _vertex_grid(region:VertexNbhd, quad:NormQuadrature, lo:float, hi:float,
                 stop:float)->Optional[_Grid]:
    if region.phi_hi <= region.phi_lo:
        return None
    lad = ladder(hi, lo, quad.n_panels, quad.n_gauss, stop)
    P, G = lad.nodes.shape
    phi, wphi = _angle_rule(region.phi_lo, region.phi_hi, quad.n_angle)
    r, ph, wr, wp = _broadcast(lad.nodes[:, :, None, None], phi[None, None, None, :],
                               lad.weights[:, :, None, None], wphi[None, None, None, :])
    return _Grid(region.polar(r, ph), (P, G, 1, len(phi)), wr*wp*r, r, None, lad.singular)

def _vertex_edge_grid(region:VertexEdgeNbhd, quad:NormQuadrature, lo:float, hi:float,
                      stop:float)->_Grid:
    lad = ladder(hi, lo, quad.n_panels, quad.n_gauss, stop)
    ang = ladder(region.phi_max, 0.0, quad.n_angle_panels, quad.n_gauss)
    P, G = lad.nodes.shape
    A, B = ang.nodes.shape
    r, ph, wr, wp = _broadcast(lad.nodes[:, :, None, None], ang.nodes[None, None, :, :],
                               lad.weights[:, :, None, None], ang.weights[None, None, :, :])
    f = region.frame
    pts = f.to_world(r*np.cos(ph), r*np.sin(ph))
    return _Grid(pts, (P, G, A, B), wr*wp*r, r, r*np.sin(ph), lad.singular, True)

def _edge_grid(region:EdgeNbhd, quad:NormQuadrature, lo:float, hi:float,
               stop:float)->_Grid:
    lad = ladder(hi, lo, quad.n_panels, quad.n_gauss, stop)
    P, G = lad.nodes.shape
    tau, wtau = composite_gauss(np.linspace(0.0, 1.0, 5), max(1, quad.n_angle//4))
    t_lo, t_hi = region.t_range(lad.nodes)
    span = np.clip(t_hi - t_lo, 0.0, None)
    n, t, wn, wt = _broadcast(lad.nodes[:, :, None, None],
                              t_lo[:, :, None, None] + span[:, :, None, None]*tau[None, None, None, :],
                              lad.weights[:, :, None, None],
                              span[:, :, None, None]*wtau[None, None, None, :])
    pts = region.frame.to_world(t, n)
    a, b = region.polygon.edge_points(region.edge)
    r_v = np.minimum(np.linalg.norm(pts - a, axis=1), np.linalg.norm(pts - b, axis=1))
    return _Grid(pts, (P, G, 1, len(tau)), wn*wt, r_v, n, lad.singular)

def _interior_grid(region:Interior, quad:NormQuadrature)->Optional[_Grid]:
    pts = region.sample(quad.n_interior, quad.seed)
    if len(pts) == 0:
        return None
    w = np.full(len(pts), region.area()/len(pts))
    return _Grid(pts, (1, len(pts), 1, 1), w, None, None, False)


def _extent(region:TRegion)->float:
    if isinstance(region, VertexInterval):
        return region.length
    if isinstance(region, EdgeNbhd):
        return region.width
    return region.xi

def region_grid(u:ScalarField, region:TRegion, quad:NormQuadrature,
               radial:Optional[Tuple[float, float]])->Optional[_Grid]:
    extent = _extent(region)
    lo, hi = (0.0, extent) if radial is None else (float(radial[0]), min(float(radial[1]), extent))
    if not hi > lo:
        return None
    stop = quad.resolved_scales*u.resolution if not u.is_analytic() and u.resolution else 0.0
    want_dim = 1 if isinstance(region, VertexInterval) else 2
    if u.dim != want_dim:
        raise DomainError(f'a {region.kind} region of dimension {want_dim} needs a field of that dimension, got {u.dim}')
    if isinstance(region, VertexInterval):
        return _interval_grid(region, quad, lo, hi, stop)
    if isinstance(region, VertexNbhd):
        return _vertex_grid(region, quad, lo, hi, stop)
    if isinstance(region, VertexEdgeNbhd):
        return _vertex_edge_grid(region, quad, lo, hi, stop)
    if isinstance(region, EdgeNbhd):
        return _edge_grid(region, quad, lo, hi, stop)
    if isinstance(region, Interior):
        return _interior_grid(region, quad)
    raise DomainError(f'no weighted norm for regions of type {type(region).__name__}')

def _squared_derivatives(u:ScalarField, region:TRegion, grid:_Grid, spec:NormSpec)->List[np.ndarray]:
    """|D u|² at the grid points for every derivative the row maximizes over."""
    if spec.p > u.p_max:
        raise DomainError(f'derivative order {spec.p} exceeds p_max={u.p_max} of this {u.kind} field')
    pts = grid.points
    if isinstance(region, VertexInterval):
        return [u.derivative(pts[:, 0], spec.p)**2]
    if isinstance(region, (VertexEdgeNbhd, EdgeNbhd)):
        if not spec.is_split:
            raise DomainError(f'{region.kind} rows need the split (p_perp, p_par)')
        return [u.directional(pts, region.frame.tangent, spec.p_par, spec.p_perp)**2]
    return [u.partial(pts, (i, spec.p - i))**2 for i in range(spec.p + 1)]

def row_exponents(kind:str, spec:NormSpec)->Tuple[float, float]:
    """Exponents (of r_v, of r_e) of the weight of a row."""
    base = -0.5 - spec.s + spec.epsilon
    if kind == 'vertex':
        return spec.p + base, 0.0
    if kind == 'vertex_edge':
        return spec.p_par + spec.epsilon, spec.p_perp + base
    if kind == 'edge':
        return 0.0, spec.p_perp + base
    return 0.0, 0.0

def _norms(u:ScalarField, region:TRegion, spec:NormSpec,
           exponents:Sequence[Tuple[float, float]], quad:NormQuadrature,
           radial:Optional[Tuple[float, float]])->List[float]:
    grid = region_grid(u, region, quad, radial)
    if grid is None:
        return [0.0]*len(exponents)
    squares = _squared_derivatives(u, region, grid, spec)
    min_exp = quad.min_exponent if u.is_analytic() else quad.discrete_min_exponent
    out = []
    for exp_v, exp_e in exponents:
        vals = [grid.integrate(sq, exp_v, exp_e, min_exp) for sq in squares]
        out.append(math.sqrt(max(vals)) if all(math.isfinite(v) for v in vals) else math.inf)
    return out

def region_norms(u:ScalarField, region:TRegion, spec:NormSpec, epsilons:Sequence[float],
                 quadrature:Optional[NormQuadrature]=None)->List[float]:
    """weighted_norm for one derivative and several ε, derivatives evaluated once."""
    quad = quadrature or DEFAULT_QUADRATURE
    exps = [row_exponents(region.kind, spec.with_epsilon(e)) for e in epsilons]
    norms = _norms(u, region, spec, exps, quad, None)
    for e, n in zip(epsilons, norms):
        if math.isinf(n):
            logger.warn({'weighted_norm_divergent': {'region': region.label, 'p': spec.p,
                         'p_perp': spec.p_perp, 'p_par': spec.p_par, 'epsilon': e}}, exists_ok=True)
    return norms

def weighted_norm(u:ScalarField, region:TRegion, spec:NormSpec,
                  quadrature:Optional[NormQuadrature]=None,
                  radial:Optional[Tuple[float, float]]=None)->float:
    """The weighted L² norm of the row `spec` on `region`, +inf when the
    integral diverges at the vertex or edge. `radial` restricts the distance
    to the vertex (the normal distance for ω_e) to a sub-range."""
    quad = quadrature or DEFAULT_QUADRATURE
    if radial is not None:
        return _norms(u, region, spec, [row_exponents(region.kind, spec)], quad, radial)[0]
    return region_norms(u, region, spec, [spec.epsilon], quad)[0]

def compact_form_ratio(u:ScalarField, region:VertexEdgeNbhd, spec:NormSpec,
                       nu:Optional[float]=None,
                       quadrature:Optional[NormQuadrature]=None)->float:
    """Vertex-edge row norm over the compact form ‖r_v^{p+ν} ρ^{p⊥+ν} D⊥^{p⊥} D∥^{p∥} u‖
    with ρ = r_e/r_v; ν defaults to ε - 1/2 - s."""
    if not isinstance(region, VertexEdgeNbhd):
        raise DomainError('the compact form is compared on vertex-edge neighborhoods')
    if not spec.is_split:
        raise DomainError('the compact form needs the split (p_perp, p_par)')
    nu = spec.epsilon - 0.5 - spec.s if nu is None else float(nu)
    if not nu > -0.5 - spec.s:
        raise DomainError(f'nu={nu} must exceed -1/2 - s')
    quad = quadrature or DEFAULT_QUADRATURE
    # r_v^{p+ν} (r_e/r_v)^{p⊥+ν} = r_v^{p∥} r_e^{p⊥+ν}
    exps = [row_exponents('vertex_edge', spec), (float(spec.p_par), spec.p_perp + nu)]
    standard, compact = _norms(u, region, spec, exps, quad, None)
    if math.isinf(standard) or math.isinf(compact):
        raise DivergenceError('compact form comparison diverges',
                              row=(region.label, spec.p_perp, spec.p_par, spec.epsilon))
    if compact == 0.0:
        return 0.0
    return standard/compact
