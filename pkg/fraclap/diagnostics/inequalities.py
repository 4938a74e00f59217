# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Measured constants of the local inequalities behind weighted regularity.

Caccioppoli checks take any field U on the half space, points
(x_1, [x_2,] y). The left side lives on B_cR(x0) × (0, cR), the right side on
B_R(x0) × (0, R). A derivative one order above the p_max of a discrete field
is replaced by the difference quotient of step τ (by default the coarsest
mesh cell in x).
Every check reports observed ratios lhs/rhs.
"""

from dataclasses import asdict, dataclass
import math
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import brentq
from scipy.special import comb

from ..common.common import logger
from ..common.errors import DivergenceError, DomainError
from ..common.timing import MeasureTime
from ..extension.checks import n_check
from ..extension.solver import ExtensionField
from ..fields.scalar_field import ScalarField
from ..fracops.bilinear import assemble_bilinear_1d
from ..fracops.fem1d import FESpace1D
from ..fracops.params import FractionalParams
from ..fracops.quadrature import composite_gauss
from ..fracops.sobolev import BrokenSpace1D, dual_norm, slobodeckij_seminorm, sobolev_norm
from ..geometry.polygon import Polygon, segment_distance
from ..geometry.regions import EdgeNbhd, VertexNbhd
from ..solver1d.mesh import uniform_mesh
from .cutoff import SmoothCutoff
from .ladder import weighted_y_rule
from .norms import DEFAULT_QUADRATURE, NormQuadrature, TRegion, VertexInterval, region_grid


TOmega = Union[Tuple[float, float], Polygon]


def _ratio(lhs:float, rhs:float)->float:
    if rhs > 0.0:
        return lhs/rhs
    return 0.0 if lhs == 0.0 else math.inf


# region ball quadrature
@dataclass(frozen=True)
class BallQuadrature:
    n_panels: int = 8       # radial panels, per half diameter in one dimension
    n_gauss: int = 8
    n_angle: int = 32
    y_gauss: int = 10
    y_panels: int = 6


DEFAULT_BALL = BallQuadrature()


def _ball_rule(center:np.ndarray, R:float, quad:BallQuadrature,
               frame:Optional[Tuple[np.ndarray, np.ndarray]]=None)->Tuple[np.ndarray, np.ndarray]:
    """Points and weights on B_R(center), or on its half on the side of
    frame = (tangent, normal)."""
    if len(center) == 1:
        x, w = composite_gauss(np.linspace(center[0] - R, center[0] + R, 2*quad.n_panels + 1),
                               quad.n_gauss)
        return x[:, None], w
    r, wr = composite_gauss(np.linspace(0.0, R, quad.n_panels + 1), quad.n_gauss)
    if frame is None:
        phi = 2.0*math.pi*(np.arange(quad.n_angle) + 0.5)/quad.n_angle
        wphi = np.full(quad.n_angle, 2.0*math.pi/quad.n_angle)
        t, n = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    else:
        phi, wphi = composite_gauss(np.linspace(0.0, math.pi, 5), max(1, quad.n_angle//4))
        t, n = frame
    rr, pp = np.meshgrid(r, phi, indexing='ij')
    rr, pp = rr.ravel(), pp.ravel()
    pts = center + rr[:, None]*(np.cos(pp)[:, None]*t + np.sin(pp)[:, None]*n)
    return pts, np.outer(wr*r, wphi).ravel()

def _slab(x:np.ndarray, wx:np.ndarray, y:np.ndarray, wy:np.ndarray)->Tuple[np.ndarray, np.ndarray]:
    pts = np.concatenate([np.repeat(x, len(y), axis=0), np.tile(y, len(x))[:, None]], axis=1)
    return pts, np.outer(wx, wy).ravel()
# endregion


# region derivatives in x
class _XDerivative(NamedTuple):
    """Σ coef ∂_x^beta; `direction` is the unit vector of a first order one."""
    terms: List[Tuple[float, Tuple[int, ...]]]
    direction: Optional[np.ndarray]

    @property
    def order(self)->int:
        return sum(self.terms[0][1])


def _x_derivatives(d:int, p:int, tangent:Optional[np.ndarray]=None)->List[_XDerivative]:
    """All ∂_x^beta with |beta| = p, or the single D_t^p along `tangent`."""
    if tangent is not None:
        t = np.asarray(tangent, dtype=float)
        terms = [(float(comb(p, i, exact=True)*t[0]**i*t[1]**(p - i)), (i, p - i))
                 for i in range(p + 1)]
        terms = [tm for tm in terms if tm[0] != 0.0] or [(0.0, (p, 0))]
        return [_XDerivative(terms, t if p == 1 else None)]
    betas = [(p,)] if d == 1 else [(i, p - i) for i in range(p + 1)]
    return [_XDerivative([(1.0, b)], np.array(b, dtype=float) if p == 1 else None) for b in betas]

def _step(g:ScalarField)->Optional[float]:
    """Default difference quotient step: the coarsest trace mesh cell of an
    extension field, the mesh scale of other discrete fields."""
    disc = getattr(g, 'disc', None)
    if disc is not None:
        return max(space.mesh.h_max for space in disc.x_spaces)
    return g.resolution

def _apply(g:ScalarField, pts:np.ndarray, D:_XDerivative, extra:Tuple[int, ...],
           tau:Optional[float])->np.ndarray:
    """D applied to ∂^extra g, by difference quotient one order above p_max."""
    pad = (0,)*(g.dim - len(D.terms[0][1]))
    order = D.order + sum(extra)
    if order <= g.p_max:
        out = np.zeros(len(pts))
        for coef, beta in D.terms:
            out += coef*g.partial(pts, tuple(a + b for a, b in zip(beta + pad, extra)))
        return out
    if D.order == 1 and sum(extra) <= g.p_max:
        h = tau or _step(g)
        if not h:
            raise DomainError('a difference quotient needs a step, the field has no mesh scale')
        shift = np.concatenate([D.direction, np.zeros(len(pad))])*h
        return (g.partial(pts + shift, extra) - g.partial(pts, extra))/h
    raise DomainError(f'derivative order {order} exceeds p_max={g.p_max} of this {g.kind} field')

def _max_sq(g:Optional[ScalarField], pts:np.ndarray, w:np.ndarray, Ds:Sequence[_XDerivative],
            tau:Optional[float], scale:Optional[np.ndarray]=None)->float:
    """max over Ds of Σ w (scale·D g)²; 0 for absent data."""
    if g is None:
        return 0.0
    zero = (0,)*g.dim
    vals = []
    for D in Ds:
        v = _apply(g, pts, D, zero, tau)
        if scale is not None:
            v = scale*v
        vals.append(float(w @ v**2))
    return max(vals)
# endregion


# region Caccioppoli
@dataclass
class CaccioppoliReport:
    """Rows (R, lhs, rhs, ratio) over a radius ladder; `constant` is the largest
    ratio and `spread` the largest over the smallest positive one."""
    rows: List[Dict[str, float]]
    constant: float
    bounded: bool
    spread: float

    def as_dict(self)->Dict:
        return asdict(self)


def _alpha(U:ScalarField, s:Optional[float])->float:
    if s is None:
        params = getattr(U, 'params', None)
        if params is None:
            raise DomainError('s is needed for a field that carries no parameters')
        s = params.s
    if not 0.0 < s < 1.0:
        raise DomainError(f's={s} must lie in (0, 1)')
    return 1.0 - 2.0*s

def _omega(U:ScalarField, omega:Optional[TOmega])->TOmega:
    omega = getattr(U, 'omega', None) if omega is None else omega
    if omega is None:
        raise DomainError('the domain Ω is needed to place the ball')
    return omega

def _check_interior(omega:TOmega, center:np.ndarray, R:float)->None:
    if isinstance(omega, Polygon):
        if len(center) != 2:
            raise DomainError('a ball in a polygon needs a two dimensional center')
        inside = bool(omega.contains(center)[0]) and \
            float(omega.boundary_distance(center)[0]) >= R*(1.0 - 1e-12)
    else:
        if len(center) != 1:
            raise DomainError('a ball in an interval needs a one dimensional center')
        a, b = float(omega[0]), float(omega[1])
        inside = center[0] - R >= a - 1e-12 and center[0] + R <= b + 1e-12
    if not inside:
        raise DomainError(f'ball B_{R:g}({center.tolist()}) is not interior to Ω')

def _boundary_frame(omega:TOmega, edge:int, center:np.ndarray,
                    R:float)->Tuple[np.ndarray, np.ndarray]:
    if not isinstance(omega, Polygon):
        raise DomainError('boundary Caccioppoli checks run on polygons')
    if len(center) != 2:
        raise DomainError('the center of a boundary ball is a point of the plane')
    a, b = omega.edge_points(edge)
    if float(segment_distance(center[None, :], a, b)[0]) > 1e-12*omega.diameter:
        raise DomainError(f'center {center.tolist()} does not lie on edge {edge}')
    others = np.delete(omega.edge_distances(center)[0], edge)
    if float(np.min(others)) < R*(1.0 - 1e-12):
        raise DomainError(f'B_R ∩ Ω is not a half ball for R={R}, '
                          f'R must not exceed {float(np.min(others)):g}')
    return omega.edge_tangent(edge), omega.edge_normal(edge)


class _Terms(NamedTuple):
    lhs: float      # max_D ‖D ∇U‖² on B_cR × (0, cR)
    grad: float     # ‖∇U‖² on B_R × (0, R)
    f_cut: float    # max_D ‖ζ D f‖² on B_R
    F0: float       # ‖F‖²_{L²_{-α}} on B_R × (0, R)


def _terms(U:ScalarField, center:np.ndarray, R:float, c:float, alpha:float, p:int,
           tangent:Optional[np.ndarray], frame, f:Optional[ScalarField],
           F:Optional[ScalarField], quad:BallQuadrature, tau:Optional[float])->_Terms:
    d = U.dim - 1
    Ds = _x_derivatives(d, p, tangent)
    x_in, wx_in = _ball_rule(center, c*R, quad, frame)
    y_in, wy_in = weighted_y_rule(alpha, c*R, quad.y_gauss, quad.y_panels)
    p_in, w_in = _slab(x_in, wx_in, y_in, wy_in)
    x_out, wx_out = _ball_rule(center, R, quad, frame)
    y_out, wy_out = weighted_y_rule(alpha, R, quad.y_gauss, quad.y_panels)
    p_out, w_out = _slab(x_out, wx_out, y_out, wy_out)

    units = [tuple(int(i == j) for i in range(d + 1)) for j in range(d + 1)]
    lhs = max(sum(float(w_in @ _apply(U, p_in, D, e, tau)**2) for e in units) for D in Ds)
    grad = sum(float(w_out @ U.partial(p_out, e)**2) for e in units)
    zeta = SmoothCutoff(center, R, c).value(x_out)
    f_cut = _max_sq(f, x_out, wx_out, _x_derivatives(d, 1, tangent), tau, zeta) if p >= 1 else 0.0
    F0 = 0.0
    if F is not None:
        y_F, wy_F = weighted_y_rule(-alpha, R, quad.y_gauss, quad.y_panels)
        p_F, w_F = _slab(x_out, wx_out, y_F, wy_F)
        F0 = float(w_F @ F.value(p_F)**2)
    return _Terms(lhs, grad, f_cut, F0)

def _ladder_report(name:str, rows:List[Dict[str, float]])->CaccioppoliReport:
    ratios = [r['ratio'] for r in rows]
    positive = [r for r in ratios if r > 0.0]
    bounded = all(math.isfinite(r) for r in ratios)
    spread = max(positive)/min(positive) if len(positive) > 1 and bounded else 1.0
    report = CaccioppoliReport(rows, max(ratios), bounded, spread)
    logger.info({name: {'R': [r['R'] for r in rows], 'ratio': ratios,
                 'constant': report.constant, 'bounded': bounded}}, exists_ok=True)
    return report

def _caccioppoli_ladder(name:str, U:ScalarField, center:np.ndarray, R:float, c:float,
                        alpha:float, tangent, frame, f, F, levels:int,
                        quad:BallQuadrature, tau:Optional[float])->CaccioppoliReport:
    if not 0.0 < c < 1.0:
        raise DomainError(f'inner fraction c={c} must lie in (0, 1)')
    if levels < 1:
        raise DomainError(f'radius ladder needs at least one level, got {levels}')
    rows = []
    for k in range(levels):
        Rk = R*0.5**k
        t = _terms(U, center, Rk, c, alpha, 1, tangent, frame, f, F, quad, tau)
        rhs = t.grad/((1.0 - c)*Rk)**2 + t.f_cut + t.F0
        rows.append({'R': Rk, 'lhs': t.lhs, 'rhs': rhs, 'ratio': _ratio(t.lhs, rhs)})
    return _ladder_report(name, rows)


@MeasureTime
def caccioppoli_interior_check(U:ScalarField, center:Sequence[float], R:float, c:float=0.5,
                               f:Optional[ScalarField]=None, F:Optional[ScalarField]=None,
                               s:Optional[float]=None, omega:Optional[TOmega]=None,
                               levels:int=3, quadrature:Optional[BallQuadrature]=None,
                               tau:Optional[float]=None)->CaccioppoliReport:
    """lhs = max_i ‖∂_{x_i}∇U‖²_{L²_α(B_cR × (0, cR))} against
    ((1-c)R)^{-2}‖∇U‖²_{L²_α(B_R × (0, R))} + max_i ‖ζ ∂_{x_i} f‖²_{L²(B_R)} + ‖F‖²_{L²_{-α}},
    over R, R/2, .. (`levels` radii)."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    alpha = _alpha(U, s)
    _check_interior(_omega(U, omega), center, R)
    return _caccioppoli_ladder('caccioppoli_interior', U, center, R, c, alpha, None, None,
                               f, F, levels, quadrature or DEFAULT_BALL, tau)

@MeasureTime
def caccioppoli_boundary_check(U:ScalarField, edge:int, center:Sequence[float], R:float,
                               c:float=0.5, f:Optional[ScalarField]=None,
                               F:Optional[ScalarField]=None, s:Optional[float]=None,
                               omega:Optional[Polygon]=None, levels:int=3,
                               quadrature:Optional[BallQuadrature]=None,
                               tau:Optional[float]=None)->CaccioppoliReport:
    """The interior check on half balls about a point of `edge`, with the
    tangential derivative D∥ only."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if U.dim != 3:
        raise DomainError('boundary Caccioppoli checks need a field over a polygon times (0, ∞)')
    alpha = _alpha(U, s)
    frame = _boundary_frame(_omega(U, omega), edge, center, R)
    return _caccioppoli_ladder('caccioppoli_boundary', U, center, R, c, alpha, frame[0], frame,
                               f, F, levels, quadrature or DEFAULT_BALL, tau)

def _gamma_p(lhs:float, N:float, data:Sequence[float], p:int, R:float)->float:
    """Smallest γ ≥ 0 with lhs ≤ (γp)^{2p}R^{-2p}N + Σ_j (γp)^{2(p-j)}R^{2(j-p)} data_j."""
    def bound(gamma:float)->float:
        g = gamma*p/R
        return g**(2*p)*N + sum(g**(2*(p - j))*data[j - 1] for j in range(1, p + 1))
    if lhs <= bound(0.0):
        return 0.0
    hi = 1.0
    while bound(hi) < lhs:
        hi *= 2.0
        if hi > 1e300:
            return math.inf
    return float(brentq(lambda g: bound(g) - lhs, 0.0, hi, xtol=1e-15*hi, rtol=1e-12))

@MeasureTime
def caccioppoli_high_order(U:ScalarField, center:Sequence[float], R:float, c:float=0.5,
                           orders:Sequence[int]=(1, 2, 3), f:Optional[ScalarField]=None,
                           F:Optional[ScalarField]=None, s:Optional[float]=None,
                           omega:Optional[TOmega]=None, edge:Optional[int]=None,
                           quadrature:Optional[BallQuadrature]=None,
                           tau:Optional[float]=None)->Dict[int, float]:
    """The smallest γ_p for which the iterated Caccioppoli bound

        max_β ‖∂^β ∇U‖²_{L²_α(B_cR × (0, cR))} ≤ (γp)^{2p} R^{-2p} ‖∇U‖²_{L²_α(B_R × (0, R))}
            + Σ_{j=1..p} (γp)^{2(p-j)} R^{2(j-p)} (max_η ‖∂^η f‖²_{L²(B_R)} + max_η ‖∂^η F‖²_{L²_{-α}})

    holds, |η| = j for f and j - 1 for F. With `edge` the ball is a half ball
    about a point of that edge and only D∥^p is taken."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    alpha = _alpha(U, s)
    om = _omega(U, omega)
    if edge is None:
        _check_interior(om, center, R)
        tangent, frame = None, None
    else:
        frame = _boundary_frame(om, edge, center, R)
        tangent = frame[0]
    quad = quadrature or DEFAULT_BALL
    d = U.dim - 1
    x_out, wx_out = _ball_rule(center, R, quad, frame)
    if F is not None:
        y_F, wy_F = weighted_y_rule(-alpha, R, quad.y_gauss, quad.y_panels)
        p_F, w_F = _slab(x_out, wx_out, y_F, wy_F)
    out = {}
    for p in orders:
        if p < 1:
            raise DomainError(f'order p={p} must be at least 1')
        t = _terms(U, center, R, c, alpha, p, tangent, frame, None, None, quad, tau)
        data = []
        for j in range(1, p + 1):
            fj = _max_sq(f, x_out, wx_out, _x_derivatives(d, j, tangent), tau)
            Fj = _max_sq(F, p_F, w_F, _x_derivatives(d, j - 1, tangent), tau) if F is not None else 0.0
            data.append(fj + Fj)
        out[int(p)] = _gamma_p(t.lhs, t.grad, data, p, R)
    logger.info({'caccioppoli_high_order': {'R': R, 'gamma_p': out}}, exists_ok=True)
    return out
# endregion


# region tubular neighborhood
def _energy_density(U:ExtensionField, n_gauss:Optional[int]=None):
    """x quadrature points of the box, weights and ∫ y^α |∇U(x, ·)|² dy at them."""
    disc = U.disc
    nq = n_gauss or disc.degree + 3
    axes, weights, B0, B1 = [], [], [], []
    for space in disc.x_spaces:
        x, w = composite_gauss(space.mesh.nodes, nq)
        axes.append(x)
        weights.append(w)
        B0.append(space.basis_values(x, 0).toarray())
        B1.append(space.basis_values(x, 1).toarray())
    My, Ky = disc.My.toarray(), disc.Ky.toarray()
    C = U.coeffs
    if disc.d == 1:
        G0, G = B0[0] @ C, [B1[0] @ C]
        pts, w = axes[0][:, None], weights[0]
    else:
        G0 = np.einsum('ai,bj,ijk->abk', B0[0], B0[1], C).reshape(-1, C.shape[-1])
        G = [np.einsum('ai,bj,ijk->abk', B1[0], B0[1], C).reshape(-1, C.shape[-1]),
             np.einsum('ai,bj,ijk->abk', B0[0], B1[1], C).reshape(-1, C.shape[-1])]
        g1, g2 = np.meshgrid(axes[0], axes[1], indexing='ij')
        pts = np.stack([g1.ravel(), g2.ravel()], axis=1)
        w = np.outer(weights[0], weights[1]).ravel()
    e = np.einsum('qj,jk,qk->q', G0, Ky, G0)
    for Gk in G:
        e += np.einsum('qj,jk,qk->q', Gk, My, Gk)
    return pts, w, e

def _boundary_distance(omega:TOmega, pts:np.ndarray)->Tuple[np.ndarray, np.ndarray]:
    if isinstance(omega, Polygon):
        return omega.contains(pts), omega.boundary_distance(pts)
    a, b = float(omega[0]), float(omega[1])
    x = pts[:, 0]
    return (x > a) & (x < b), np.minimum(x - a, b - x)

@MeasureTime
def tubular_bound_check(U:ExtensionField, R_ladder:Sequence[float], t:float,
                        f:Optional[ScalarField]=None, F:Optional[ScalarField]=None)->Dict:
    """lhs_R = R^{-2t}‖∇U‖²_{L²_α(S_R × (0, Y))} over the ladder, S_R the points of
    Ω within R of ∂Ω, against mid = ‖r_∂Ω^{-t} ∇U‖²_{L²_α(Ω × (0, Y))} and
    mid/N²(U, F, f). lhs_R ≤ mid holds point by point on the shared
    quadrature."""
    if not isinstance(U, ExtensionField):
        raise DomainError('the tubular bound is measured on extension fields')
    if not 0.0 <= t < 0.5:
        raise DomainError(f'weight order t={t} must lie in [0, 1/2)')
    pts, w, e = _energy_density(U)
    inside, r = _boundary_distance(U.omega, pts)
    w, e, r = w[inside], e[inside], r[inside]
    energy = float(w @ e)
    mid = float(w @ (r**(-2.0*t)*e))
    rows = []
    for R in sorted(R_ladder, reverse=True):
        if not R > 0:
            raise DomainError(f'tube width R={R} must be positive')
        near = r < R
        rows.append({'R': float(R), 'lhs': float(R**(-2.0*t)*(w[near] @ e[near]))})
    N2 = n_check(U, F, f).N2 if U.d == 1 else None
    report = {'t': float(t), 'rows': rows, 'mid': mid, 'energy': energy, 'N2': N2,
              'ratio': _ratio(mid, N2) if N2 is not None else None,
              'consistent': all(row['lhs'] <= mid*(1.0 + 1e-12) for row in rows),
              'finite': math.isfinite(mid)}
    logger.info({'tubular_bound': {'t': t, 'mid': mid, 'N2': N2,
                 'consistent': report['consistent']}}, exists_ok=True)
    return report
# endregion


# region Hardy
@MeasureTime
def hardy_check(u:ScalarField, region:TRegion, epsilon:float, s:float,
                quadrature:Optional[NormQuadrature]=None)->Dict[str, float]:
    """‖r^{-1/2-s+ε} u‖ / ‖r^{1/2-s+ε} ∂_r u‖ on a vertex neighborhood (∂_r
    radial, r the distance to the vertex) or an edge neighborhood (∂_r the
    normal derivative, r the distance to the edge). u must vanish at the
    vertex or edge, otherwise the left side diverges and DivergenceError is
    raised."""
    if not 0.0 < s < 1.0:
        raise DomainError(f's={s} must lie in (0, 1)')
    quad = quadrature or DEFAULT_QUADRATURE
    grid = region_grid(u, region, quad, None)
    if grid is None:
        return {'lhs': 0.0, 'rhs': 0.0, 'ratio': 0.0}
    pts = grid.points
    if isinstance(region, VertexInterval):
        du = u.derivative(pts[:, 0], 1)
    elif isinstance(region, VertexNbhd):
        rel = pts - region.polygon.vertices[region.vertex]
        du = np.einsum('ij,ij->i', u.gradient(pts), rel)/np.linalg.norm(rel, axis=1)
    elif isinstance(region, EdgeNbhd):
        du = u.directional(pts, region.frame.tangent, 0, 1)
    else:
        raise DomainError(f'no Hardy inequality on {region.kind} regions')
    base = -0.5 - s + epsilon
    if region.kind == 'vertex':
        e_lhs, e_rhs = (base, 0.0), (base + 1.0, 0.0)
    else:
        e_lhs, e_rhs = (0.0, base), (0.0, base + 1.0)
    min_exp = quad.min_exponent if u.is_analytic() else quad.discrete_min_exponent
    lhs2 = grid.integrate(u.value(pts)**2, *e_lhs, min_exp)
    if math.isinf(lhs2):
        raise DivergenceError(f'u does not vanish at {region.label}, the weighted L² side diverges',
                              row=(region.label, epsilon))
    rhs2 = grid.integrate(du**2, *e_rhs, min_exp)
    if math.isinf(rhs2):
        raise DivergenceError(f'weighted derivative of u diverges at {region.label}',
                              row=(region.label, epsilon))
    lhs, rhs = math.sqrt(lhs2), math.sqrt(rhs2)
    out = {'lhs': lhs, 'rhs': rhs, 'ratio': _ratio(lhs, rhs)}
    logger.debug({'hardy': dict(out, region=region.label, epsilon=epsilon)}, exists_ok=True)
    return out
# endregion


# region localization
@MeasureTime
def localization_check(f:ScalarField, s:float, R_ladder:Sequence[float]=(0.4, 0.2, 0.1),
                       center:float=0.0, c:float=0.5,
                       omega:Tuple[float, float]=(-1.0, 1.0), n:int=128,
                       degree:int=2)->Dict:
    """Ratios of the localization bounds for ηf with η the C² cutoff of B_R:

        a1 = ‖ηf‖_{H^{-s}(Ω)} / (‖η‖_∞ ‖f‖_{L²(B_R)})
        a2 = ‖ηf‖_{H^{1-s}(Ω)} / ([(R^s ‖∇η‖_∞ + R^{s-1} + 1)‖η‖_∞] ‖f‖_{L²(Ω)} + ‖η‖_∞ |f|_{H^{1-s}(Ω)})

    the dual norm by the Riesz surrogate on a uniform P_degree mesh of Ω."""
    if f.dim != 1:
        raise DomainError('the localization check runs on intervals')
    params = FractionalParams(s, 1)
    a, b = float(omega[0]), float(omega[1])
    mesh = uniform_mesh(n, (a, b))
    space = FESpace1D(mesh, degree)
    A = assemble_bilinear_1d(mesh, degree, params)
    broken = BrokenSpace1D(mesh, degree)
    x, w = composite_gauss(mesh.nodes, degree + 4)
    f_l2 = math.sqrt(max(float(w @ f.value(x)**2), 0.0))
    f_semi = slobodeckij_seminorm(broken, broken.interpolate(lambda z, e: f.value(z)), 1.0 - s)

    rows = []
    for R in R_ladder:
        if not (center - R >= a - 1e-12 and center + R <= b + 1e-12):
            raise DomainError(f'ball B_{R:g}({center:g}) does not lie in Ω')
        eta = SmoothCutoff([center], R, c)
        def eta_f(z:np.ndarray)->np.ndarray:
            return eta.value(z)*f.value(z)
        lhs1 = dual_norm(space.load_vector(eta_f)[space.free_dofs], A)
        xb, wb = composite_gauss(np.linspace(center - R, center + R, 17), 8)
        eta_sup = float(np.max(np.abs(eta.value(xb))))
        rhs1 = eta_sup*math.sqrt(max(float(wb @ f.value(xb)**2), 0.0))
        lhs2 = sobolev_norm(broken, broken.interpolate(lambda z, e: eta_f(z)), 1.0 - s)
        rhs2 = eta_sup*((R**s*eta.grad_sup + R**(s - 1.0) + 1.0)*f_l2 + f_semi)
        rows.append({'R': float(R), 'eta_sup': eta_sup,
                     'a1_lhs': lhs1, 'a1_rhs': rhs1, 'a1_ratio': _ratio(lhs1, rhs1),
                     'a2_lhs': lhs2, 'a2_rhs': rhs2, 'a2_ratio': _ratio(lhs2, rhs2)})

    def spread(key:str)->float:
        vals = [r[key] for r in rows if r[key] > 0.0]
        return max(vals)/min(vals) if len(vals) > 1 else 1.0
    report = {'rows': rows,
              'a1_max': max(r['a1_ratio'] for r in rows), 'a2_max': max(r['a2_ratio'] for r in rows),
              'a1_spread': spread('a1_ratio'), 'a2_spread': spread('a2_ratio')}
    logger.info({'localization': {k: v for k, v in report.items() if k != 'rows'}}, exists_ok=True)
    return report
# endregion
