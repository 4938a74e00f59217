# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Fractional Sobolev norms of one dimensional piecewise polynomials.

Functions live in the broken space of polynomials of a fixed degree on every
element; coefficient e·(p+1) + j is the value at local Lagrange node j of
element e. Continuous functions and element-wise derivatives are both exact
members of such a space, so one seminorm matrix serves traces, fluxes and data.
"""

from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from ..common.errors import DomainError, SolverError
from ..common.timing import MeasureTime
from .fem1d import FESpace1D, LagrangeBasis, Mesh1D
from .quadrature import gauss_jacobi, gauss_legendre
from .bilinear import _flip, _near_points, _reference_self, _shifted_quotient


class BrokenSpace1D:
    def __init__(self, mesh:Mesh1D, degree:int) -> None:
        self.mesh = mesh
        self.degree = degree
        self.basis = LagrangeBasis(degree)

    @property
    def n_dofs(self)->int:
        return self.mesh.n_elements*(self.degree + 1)

    def element_dofs(self, e:int)->np.ndarray:
        return e*(self.degree + 1) + np.arange(self.degree + 1)

    def interpolate(self, fn:Callable[[np.ndarray, int], np.ndarray])->np.ndarray:
        """Coefficients from fn(x, e), the values at points x of element e
        (taken from inside e, so one-sided at element ends)."""
        p = self.degree
        ref = np.linspace(0.0, 1.0, p + 1)
        out = np.zeros(self.n_dofs)
        for e in range(self.mesh.n_elements):
            x = self.mesh.nodes[e] + self.mesh.h[e]*ref
            out[self.element_dofs(e)] = fn(x, e)
        return out

    def from_continuous(self, space:FESpace1D, coeffs:np.ndarray, deriv:int=0)->np.ndarray:
        """Broken coefficients of (d/dx)^deriv of a continuous FE function."""
        if space.mesh is not self.mesh and not np.array_equal(space.mesh.nodes, self.mesh.nodes):
            raise DomainError('spaces must share the mesh')
        p = space.degree
        def fn(x:np.ndarray, e:int)->np.ndarray:
            xi = (x - self.mesh.nodes[e]) / self.mesh.h[e]
            q = space.basis.eval(xi, deriv) / self.mesh.h[e]**deriv
            return q @ coeffs[e*p + np.arange(p + 1)]
        return self.interpolate(fn)

    def continuous_map(self, space:FESpace1D, deriv:int=0)->sp.csr_matrix:
        """Sparse matrix P with from_continuous(space, c, deriv) = P @ c, for a
        continuous space of the same degree on the same mesh."""
        if space.degree != self.degree or not np.array_equal(space.mesh.nodes, self.mesh.nodes):
            raise DomainError('spaces must share mesh and degree')
        p = self.degree
        ref = space.basis.eval(np.linspace(0.0, 1.0, p + 1), deriv)
        h = self.mesh.h
        n_el = self.mesh.n_elements
        loc = np.arange(p + 1)
        rows = (np.arange(n_el)[:, None, None]*(p + 1) + loc[None, :, None]).repeat(p + 1, axis=2)
        cols = (np.arange(n_el)[:, None, None]*p + loc[None, None, :]).repeat(p + 1, axis=1)
        vals = ref[None, :, :] / h[:, None, None]**deriv
        return sp.csr_matrix((vals.ravel(), (rows.ravel(), cols.ravel())),
                             shape=(self.n_dofs, space.n_dofs))

    def mass_matrix(self)->np.ndarray:
        p = self.degree
        rule = gauss_legendre(p + 2)
        q = self.basis.eval(rule.nodes)
        ref = (q * rule.weights[:, None]).T @ q
        M = np.zeros((self.n_dofs, self.n_dofs))
        for e in range(self.mesh.n_elements):
            d = self.element_dofs(e)
            M[np.ix_(d, d)] = self.mesh.h[e]*ref
        return M


def _adjacent_broken(coeffs:np.ndarray, flipped:np.ndarray, h1:float, h2:float, t:float,
                     rx, reta, quotient:bool)->np.ndarray:
    """∬_{K×K'} (u(x)-u(z))² |x-z|^{-1-2t} as a (2p+2)² matrix over the pair's
    broken dofs (K first). In general values need not match at the shared
    vertex and the radial Duffy variable carries the weight ξ^{-2t}. With
    `quotient` the function is taken continuous there, the vanishing difference
    is divided out and the weight becomes ξ^{2-2t} (needed for t ≥ 1/2)."""
    p1 = coeffs.shape[0]
    xi = np.repeat(rx.nodes, len(reta.nodes))
    eta = np.tile(reta.nodes, len(rx.nodes))
    w = np.repeat(rx.weights, len(reta.nodes)) * np.tile(reta.weights, len(rx.nodes))

    def vals(c:np.ndarray, arg:np.ndarray)->np.ndarray:
        out = np.zeros((c.shape[0], len(arg)))
        for k in range(c.shape[1]):
            out += np.outer(c[:, k], arg**k)
        return out

    ones = np.ones_like(eta)
    res = np.zeros((2*p1, 2*p1))
    for a_sc, b_sc, ker in ((ones, eta, h1 + h2*eta), (eta, ones, h1*eta + h2)):
        if quotient:
            g = np.vstack([_shifted_quotient(flipped, xi, a_sc), -_shifted_quotient(coeffs, xi, b_sc)])
        else:
            g = np.vstack([vals(flipped, xi*a_sc), -vals(coeffs, xi*b_sc)])
        wk = w * ker**(-1.0 - 2*t)
        res += (g * wk[None, :]) @ g.T
    return h1*h2*res

@MeasureTime
def seminorm_matrix(space:BrokenSpace1D, t:float, exterior:bool=False,
                    n_far:Optional[int]=None, chunk:int=1024)->np.ndarray:
    """S with cᵀSc = ∬ |u(x)-u(z)|² |x-z|^{-1-2t} over I×I for the mesh
    interval I, or over R×R for the zero extension of u when exterior=True."""
    if not 0.0 < t < 1.0:
        raise DomainError(f'Slobodeckij order t={t} must lie in (0, 1)')
    if exterior and t >= 0.5:
        raise DomainError('zero extensions of broken functions have finite H^t norm only for t < 1/2')
    mesh, p = space.mesh, space.degree
    nodes, h, n_el = mesh.nodes, mesh.h, mesh.n_elements
    a_end, b_end = nodes[0], nodes[-1]
    N = space.n_dofs
    S = np.zeros((N, N))
    p1 = p + 1

    ref_self = _reference_self(space, t)
    for e in range(n_el):
        d = space.element_dofs(e)
        S[np.ix_(d, d)] += h[e]**(1 - 2*t) * ref_self

    if n_el > 1:
        quotient = t >= 0.5
        rx = gauss_jacobi((2.0 if quotient else 0.0) - 2.0*t, p + 2, (0.0, 1.0))
        reta = gauss_legendre(2*p + 16)
        coeffs = space.basis.coeffs
        flipped = _flip(coeffs)
        for e in range(n_el - 1):
            d = np.concatenate([space.element_dofs(e), space.element_dofs(e + 1)])
            S[np.ix_(d, d)] += 2.0*_adjacent_broken(coeffs, flipped, h[e], h[e+1], t, rx, reta, quotient)

    # 2∫ u² μ_K with μ_K the kernel mass of I∖P_K (plus R∖I with exterior)
    for e in range(n_el):
        a, b = nodes[e], nodes[e+1]
        pl, pr = nodes[max(e-1, 0)], nodes[min(e+2, n_el)]
        d = space.element_dofs(e)
        local = np.zeros((p1, p1))
        for side, pt, end in (('left', pl, a_end), ('right', pr, b_end)):
            dist = (a - pt) if side == 'left' else (pt - b)
            if dist == 0.0:
                if exterior:
                    rule = gauss_jacobi(-2.0*t, p + 1, (a, b), side=side)
                    q = space.basis.eval((rule.nodes - a)/h[e])
                    local += (q * (rule.weights/(2*t))[:, None]).T @ q
                continue
            rule = gauss_legendre(_near_points(dist/h[e], p), (a, b))
            x = rule.nodes
            near = (x - pt) if side == 'left' else (pt - x)
            kern = near**(-2*t)
            if not exterior:
                far_end = (x - end) if side == 'left' else (end - x)
                kern = kern - far_end**(-2*t)
            q = space.basis.eval((x - a)/h[e])
            local += (q * (rule.weights*kern/(2*t))[:, None]).T @ q
        S[np.ix_(d, d)] += 2.0*local

    if n_el > 2:
        nf = n_far or max(2*p + 6, 10)
        rule = gauss_legendre(nf)
        q = space.basis.eval(rule.nodes)
        xq = (nodes[:-1, None] + np.outer(h, rule.nodes)).ravel()
        wq = (h[:, None]*rule.weights[None, :]).ravel()
        eq = np.repeat(np.arange(n_el), nf)
        nq = len(xq)
        B = np.zeros((N, nq))
        for j in range(p1):
            B[eq*p1 + j, np.arange(nq)] = np.tile(q[:, j], n_el)*wq
        F = np.zeros((N, N))
        for c0 in range(0, nq, chunk):
            c1 = min(c0 + chunk, nq)
            dist = np.abs(xq[:, None] - xq[None, c0:c1])
            far = np.abs(eq[:, None] - eq[None, c0:c1]) > 1
            K = np.zeros_like(dist)
            K[far] = dist[far]**(-1.0 - 2*t)
            F += B @ (K @ B[:, c0:c1].T)
        S -= 2.0*F

    return 0.5*(S + S.T)

def quadratic_norm(S:np.ndarray, c:np.ndarray)->float:
    return float(np.sqrt(max(float(c @ S @ c), 0.0)))

def slobodeckij_seminorm(space:BrokenSpace1D, c:np.ndarray, t:float,
                         exterior:bool=False)->float:
    return quadratic_norm(seminorm_matrix(space, t, exterior), c)

def sobolev_norm(space:BrokenSpace1D, c:np.ndarray, t:float, exterior:bool=False)->float:
    """(‖u‖²_{L²} + |u|²_{H^t})^{1/2}; t = 0 gives the L² norm."""
    l2 = float(c @ space.mass_matrix() @ c)
    if t == 0.0:
        return float(np.sqrt(l2))
    semi = slobodeckij_seminorm(space, c, t, exterior)
    return float(np.sqrt(l2 + semi**2))

def dual_norm(b:np.ndarray, A:np.ndarray)->float:
    """sqrt(bᵀ A⁻¹ b), the norm of the functional with load vector b in the
    dual of the space normed by A."""
    if not np.any(b):
        return 0.0
    try:
        factor = cho_factor(A)
    except LinAlgError as e:
        raise SolverError(f'matrix of the dual norm is not positive definite: {e}') from e
    return float(np.sqrt(max(float(b @ cho_solve(factor, b)), 0.0)))
