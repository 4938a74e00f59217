# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Dirichlet-to-Neumann recovery -d_s lim y^α ∂_y U.

Two estimates of the flux g = y^α ∂_y U at y = 0:

'levels' uses the values at the lowest three y levels. On a cell (a, b) the
nodal difference gives g exactly when g is constant there:
g ≈ (U(b) - U(a))·(1-α)/(b^{1-α} - a^{1-α}). Near y = 0,
g(y) = g(0) + c·y^{1+α} + ..., so the first two cell estimates carry errors in
a known ratio and one Richardson step removes the leading term. This is the
estimate for fields known pointwise.

Galerkin solutions with P1 y elements do not have the pointwise profile on a
cell: their nodal differences carry the weighted stiffness of the cell,
g ≈ (U(b) - U(a))·∫_a^b y^α dy/(b - a)^2, and the discrete equation at the
first interior level ties the two cell fluxes through the weighted row masses
∫ y^α ψ_0 and ∫ y^α ψ_1. `galerkin=True` uses those in place of the pointwise
flux and moments, which removes a first cell bias of 1/(1 - α^2).

'weak' is the residual of the weak form at the trace level,
b(U, φ_i ψ_0) - ∫ F φ_i ψ_0 = -∫ g(0) φ_i, divided by the lumped trace mass.
It is the default for ExtensionField.
"""

from functools import reduce
from typing import Optional, Sequence, Tuple

import numpy as np

from ..common.errors import DomainError
from ..fields.grid import GridField
from ..fields.scalar_field import ScalarField
from ..fracops.params import FractionalParams
from .solver import ExtensionField, _volume_load


DTN_METHODS = ('weak', 'levels')


def _cell_flux(u0:np.ndarray, u1:np.ndarray, a:float, b:float, alpha:float)->np.ndarray:
    return (u1 - u0)*(1.0 - alpha)/(b**(1.0 - alpha) - a**(1.0 - alpha))

def _error_moment(a:float, b:float, alpha:float)->float:
    # cell estimate of y^{1+α} under the flux formula above
    return 0.5*(b*b - a*a)*(1.0 - alpha)/(b**(1.0 - alpha) - a**(1.0 - alpha))

def _galerkin_cell_flux(u0:np.ndarray, u1:np.ndarray, a:float, b:float, alpha:float)->np.ndarray:
    return (u1 - u0)*(b**(1.0 + alpha) - a**(1.0 + alpha))/((1.0 + alpha)*(b - a)**2)

def _hat_masses(y1:float, y2:float, alpha:float)->Tuple[float, float]:
    """∫ y^α ψ_0 and ∫ y^α ψ_1 for the P1 hats at y = 0 and y = y1."""
    p, q = 1.0 + alpha, 2.0 + alpha
    m0 = y1**p/(p*q)
    right = (y2*(y2**p - y1**p)/p - (y2**q - y1**q)/q)/(y2 - y1)
    return m0, y1**p/q + right

def dtn_from_levels(values:np.ndarray, y:Sequence[float], params:FractionalParams,
                    galerkin:bool=False)->np.ndarray:
    """-d_s·g(0) from values (n, ≥3) at the y nodes y[0] = 0 < y[1] < y[2].

    `galerkin` reads the values as P1 nodal coefficients of a discrete solution."""
    values = np.asarray(values, dtype=float)
    y = np.asarray(y, dtype=float)
    if values.ndim != 2 or values.shape[1] < 3 or len(y) < 3:
        raise DomainError('flux extrapolation needs at least three y levels')
    if y[0] != 0.0 or not (0.0 < y[1] < y[2]):
        raise DomainError(f'y levels must start at 0 and increase, got {y[:3].tolist()}')
    alpha = params.alpha
    if galerkin:
        g0 = _galerkin_cell_flux(values[:, 0], values[:, 1], 0.0, y[1], alpha)
        g1 = _galerkin_cell_flux(values[:, 1], values[:, 2], y[1], y[2], alpha)
        m0, m1 = _hat_masses(y[1], y[2], alpha)
        r = m0/m1
        return -params.d_s*((1.0 + r)*g0 - r*g1)
    g0 = _cell_flux(values[:, 0], values[:, 1], 0.0, y[1], alpha)
    g1 = _cell_flux(values[:, 1], values[:, 2], y[1], y[2], alpha)
    R = _error_moment(y[1], y[2], alpha)/_error_moment(0.0, y[1], alpha)
    return -params.d_s*(R*g0 - g1)/(R - 1.0)

def dtn_weak(U:ExtensionField, params:Optional[FractionalParams]=None)->np.ndarray:
    """d_s times the trace level weak form residual over the lumped trace mass,
    shape of the trace grid."""
    params = params or U.params
    disc = U.disc
    r = (disc.stiffness() @ U.coeffs.ravel()).reshape(disc.shape)[..., 0]
    if U.F is not None:
        r = r - _volume_load(disc, U.F, U.H)[..., 0]
    lumped = reduce(np.multiply.outer, [np.asarray(M.sum(axis=1)).ravel() for M in disc.Mx])
    return params.d_s*r/lumped

def dtn_trace(U:ScalarField, params:Optional[FractionalParams]=None,
              x:Optional[np.ndarray]=None, y_levels:Optional[Sequence[float]]=None,
              method:str='weak')->GridField:
    """(-Δ)^s tr U recovered as -d_s lim_{y→0} y^α ∂_y U on Ω.

    For an ExtensionField the result lives on the trace dofs of Ω (on the whole
    box grid, zero off Ω, for d = 2); `method` picks the weak form residual or
    the first three y levels. Any other field on R × R_+ is sampled at points x
    and `y_levels`."""
    if method not in DTN_METHODS:
        raise DomainError(f'unknown flux method "{method}", expected one of {DTN_METHODS}')
    if isinstance(U, ExtensionField):
        params = params or U.params
        if len(U.y_mesh.nodes) < 3:
            raise DomainError('the y mesh is too coarse for flux recovery (< 3 levels)')
        mask = U.trace_mask()
        if method == 'weak':
            g = dtn_weak(U, params)
        else:
            levels = U.coeffs[..., :3].reshape(-1, 3)
            g = dtn_from_levels(levels, U.y_mesh.nodes[:3], params, galerkin=True).reshape(mask.shape)
        axes = U.disc.x_coords()
        if U.d == 1:
            return GridField([axes[0][mask]], g[mask])
        return GridField(axes, np.where(mask, g, 0.0))

    if params is None or x is None or y_levels is None:
        raise DomainError('sampling a field needs params, x and y_levels')
    if U.dim != 2:
        raise DomainError('sampled flux recovery is for fields on R × R_+')
    x = np.sort(np.asarray(x, dtype=float).ravel())
    y = np.asarray(y_levels, dtype=float)
    pts = np.stack([np.repeat(x, len(y)), np.tile(y, len(x))], axis=1)
    vals = U.value(pts).reshape(len(x), len(y))
    return GridField([x], dtn_from_levels(vals, y, params))
