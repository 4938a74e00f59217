# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Measured constants of the inequalities around the extension problem.

Every check returns an observed ratio lhs/rhs; a bounded ratio across an
ensemble and under refinement is the numerical evidence for the inequality.
"""

from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from ..common.common import logger
from ..common.errors import DomainError, SolverError
from ..common.timing import MeasureTime
from ..fields.scalar_field import ScalarField
from ..fracops.bilinear import assemble_bilinear_1d
from ..fracops.fem1d import FESpace1D
from ..fracops.quadrature import composite_gauss, gauss_jacobi
from ..fracops.sobolev import BrokenSpace1D, dual_norm, seminorm_matrix, sobolev_norm
from .solver import ExtensionField


SHIFT_PROBE_GRID = (0.0, 0.2, 0.4, 0.45)


@dataclass(frozen=True)
class NCheckReport:
    """Energy ‖∇U‖², data norms, N² = ‖∇U‖(‖∇U‖ + ‖F‖_{L²_{-α}} + ‖f‖_{H^{1-s}})
    and the a priori ratio ‖∇U‖/(‖F‖_{L²_{-α}} + ‖f‖_{H^{-s}})."""
    energy: float
    F_norm: float
    f_dual_norm: float
    f_h1ms_norm: float
    N2: float
    apriori_ratio: float

    def as_dict(self)->Dict[str, float]:
        return asdict(self)


def _check_energy(U:ExtensionField)->float:
    if not U.energy > 0.0:
        raise SolverError('the field has zero energy, the ratio is undefined')
    return U.energy

def _require_1d(U:ExtensionField, what:str)->None:
    if U.d != 1:
        raise DomainError(f'{what} is implemented for one dimensional traces')

def poincare_check(U:ExtensionField, H_cut:float)->float:
    """‖U‖_{L²_α(box × (0, H_cut))} / ‖∇U‖_{L²_α}."""
    if not H_cut > 0:
        raise DomainError(f'cut height {H_cut} must be positive')
    E = _check_energy(U)
    key = ('mass', min(float(H_cut), U.Y))
    M = U.disc.cache.get(key)
    if M is None:
        M = U.disc.mass(upper=key[1])
        U.disc.cache[key] = M
    c = U.coeffs.ravel()
    return float(np.sqrt(max(float(c @ (M @ c)), 0.0)/E))

def _trace_form(U:ExtensionField):
    """Broken space, continuous-to-broken map, Slobodeckij matrix of order s on
    the box interval I and the quadratic form of the kernel mass of R∖I."""
    disc = U.disc
    key = ('trace_form', U.params.s)
    if key not in disc.cache:
        space = disc.x_spaces[0]
        broken = BrokenSpace1D(space.mesh, space.degree)
        P = broken.continuous_map(space)
        s = U.params.s
        S = seminorm_matrix(broken, s)
        a, b = space.mesh.interval
        x, w = composite_gauss(space.mesh.nodes, space.degree + 8)
        kern = ((x - a)**(-2*s) + (b - x)**(-2*s))/(2*s)
        B = space.basis_values(x)
        T = (B.T @ sp.diags(w*kern) @ B).toarray()
        disc.cache[key] = (P, S, T)
    return disc.cache[key]

def trace_inequality_check(U:ExtensionField)->float:
    """‖(-Δ)^{s/2} tr U‖_{L²(R)} / (d_s^{1/2} ‖∇U‖_{L²_α}), with the numerator
    from the Slobodeckij double integral of the zero extended trace scaled by
    C(1, s)/2. The extension of a trace minimizes the energy, so the ratio is
    at most 1 up to discretization error."""
    _require_1d(U, 'the trace inequality check')
    u0 = U.coeffs[:, 0]
    if not np.any(u0):
        return 0.0
    E = _check_energy(U)
    P, S, T = _trace_form(U)
    bc = P @ u0
    semi2 = float(bc @ S @ bc) + 2.0*float(u0 @ T @ u0)
    p = U.params
    return float(np.sqrt(max(0.5*p.C_ds*semi2, 0.0)/(p.d_s*E)))

def multiplicative_trace_check(V, H:Optional[float]=None, alpha:Optional[float]=None,
                               n_quad:int=40)->float:
    """max over profiles of |V(0)|² / (‖V‖^{1-α} ‖∂_y V‖^{1+α} + ‖V‖²), norms in
    L²_α(0, H/4).

    V is an ExtensionField (one profile per trace dof, H defaults to its H) or
    a one dimensional ScalarField in y (H and alpha required)."""
    if isinstance(V, ExtensionField):
        H = V.H if H is None else float(H)
        alpha = V.params.alpha
        upper = min(0.25*H, V.Y)
        My, Ky = V.disc.y_matrices(upper)
        P = V.coeffs.reshape(-1, V.disc.shape[-1])
        nv2 = np.einsum('ij,ij->i', P, (My @ P.T).T)
        nd2 = np.einsum('ij,ij->i', P, (Ky @ P.T).T)
        v0 = P[:, 0]
    elif isinstance(V, ScalarField) and V.dim == 1:
        if H is None or alpha is None:
            raise DomainError('a profile needs the support height H and the weight exponent alpha')
        rule = gauss_jacobi(alpha, n_quad, (0.0, 0.25*H))
        nv2 = np.array([float(np.sum(rule.weights*V.value(rule.nodes)**2))])
        nd2 = np.array([float(np.sum(rule.weights*V.derivative(rule.nodes, 1)**2))])
        v0 = V.value([0.0])
    else:
        raise DomainError('profiles come from an ExtensionField or a one dimensional field')
    if not H > 0:
        raise DomainError(f'support height H={H} must be positive')
    nv, nd = np.sqrt(np.maximum(nv2, 0.0)), np.sqrt(np.maximum(nd2, 0.0))
    denom = nv**(1.0 - alpha)*nd**(1.0 + alpha) + nv**2
    ok = denom > 0
    if not np.any(ok):
        return 0.0
    return float(np.max(v0[ok]**2/denom[ok]))

def _f_norms(U:ExtensionField, f:Optional[ScalarField]):
    if f is None:
        return 0.0, 0.0
    _require_1d(U, 'the data norms of f')
    mesh, _, _ = U.omega_mesh()
    p = U.disc.degree
    space = FESpace1D(mesh, p)
    A = assemble_bilinear_1d(mesh, p, U.params)
    b = space.load_vector(f.value)[space.free_dofs]
    f_dual = dual_norm(b, A)
    broken = BrokenSpace1D(mesh, p)
    c = broken.interpolate(lambda x, e: f.value(x))
    f_h = sobolev_norm(broken, c, 1.0 - U.params.s)
    return f_dual, f_h

def F_norm(U:ExtensionField, F:Optional[ScalarField])->float:
    """‖F‖_{L²_{-α}(box × (0, H))}."""
    if F is None:
        return 0.0
    disc = U.disc
    pts, wx, _ = disc.x_quadrature()
    y, wy = disc.y_quadrature(-disc.alpha, upper=U.H)
    full = np.concatenate([np.repeat(pts, len(y), axis=0), np.tile(y, len(pts))[:, None]], axis=1)
    vals = F.value(full).reshape(len(pts), len(y))
    return float(np.sqrt(max(float(wx @ (vals**2) @ wy), 0.0)))

@MeasureTime
def n_check(U:ExtensionField, F:Optional[ScalarField]=None,
            f:Optional[ScalarField]=None)->NCheckReport:
    """Energy, data norms, N²(U, F, f) and the measured a priori constant.
    Data default to what U was solved with."""
    F = U.F if F is None else F
    f = U.f if f is None else f
    E = U.energy
    nF = F_norm(U, F)
    f_dual, f_h = _f_norms(U, f)
    gu = float(np.sqrt(max(E, 0.0)))
    denom = nF + f_dual
    apriori = gu/denom if denom > 0 else (0.0 if gu == 0 else float('inf'))
    report = NCheckReport(E, nF, f_dual, f_h, gu*(gu + nF + f_h), apriori)
    logger.info({'n_check': report.as_dict()}, exists_ok=True)
    return report

def _norm_matrix(U:ExtensionField, t:float)->Tuple[sp.csr_matrix, sp.csr_matrix, np.ndarray]:
    key = ('htnorm', t)
    disc = U.disc
    if key not in disc.cache:
        space = disc.x_spaces[0]
        broken = BrokenSpace1D(space.mesh, space.degree)
        S = broken.mass_matrix()
        if t > 0:
            S = S + seminorm_matrix(broken, t)
        disc.cache[key] = (broken.continuous_map(space), broken.continuous_map(space, 1), S)
    return disc.cache[key]

def shift_theorem_probe(U:ExtensionField, t:float, F:Optional[ScalarField]=None,
                        f:Optional[ScalarField]=None,
                        report:Optional[NCheckReport]=None)->Dict[str, float]:
    """lhs = ∫ y^α ‖∇U(·, y)‖²_{H^t(B)} dy over the box B, rhs = N²(U, F, f)
    and their ratio, the observed constant C_t. t must lie in [0, 1/2)."""
    if not 0.0 <= t < 0.5:
        raise DomainError(f'shift order t={t} must lie in [0, 1/2)')
    _require_1d(U, 'the shift theorem probe')
    P0, P1, S = _norm_matrix(U, t)
    C = U.coeffs
    B0, B1 = P0 @ C, P1 @ C
    My, Ky = U.disc.My.toarray(), U.disc.Ky.toarray()
    lhs = float(np.sum(My*(B1.T @ S @ B1)) + np.sum(Ky*(B0.T @ S @ B0)))
    report = report or n_check(U, F, f)
    rhs = report.N2
    ratio = lhs/rhs if rhs > 0 else (0.0 if lhs == 0 else float('inf'))
    return {'t': float(t), 'lhs': lhs, 'rhs': rhs, 'ratio': ratio}

def shift_probe_grid(U:ExtensionField, ts:Sequence[float]=SHIFT_PROBE_GRID,
                     F:Optional[ScalarField]=None, f:Optional[ScalarField]=None)->Dict:
    """shift_theorem_probe over a grid of t; `monotone` tells whether the
    observed C_t is nondecreasing along the grid."""
    report = n_check(U, F, f)
    rows:List[Dict[str, float]] = [shift_theorem_probe(U, t, report=report) for t in sorted(ts)]
    ratios = [r['ratio'] for r in rows]
    monotone = all(b >= a*(1 - 1e-12) for a, b in zip(ratios, ratios[1:]))
    finite = all(np.isfinite(r) for r in ratios)
    logger.info({'shift_probe': {'t': [r['t'] for r in rows], 'C_t': ratios,
                 'monotone': monotone}}, exists_ok=True)
    return {'rows': rows, 'monotone': monotone, 'finite': finite}
