# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Galerkin matrix of the one dimensional fractional Laplacian.

a(u, v) = C/2 ∬_{R×R} (u(x)-u(z))(v(x)-v(z)) |x-z|^{-1-2s} dz dx is split by
element. For x in element K let P_K be K with its neighbours and
κ_K(x) = ∫_{R∖P_K} |x-z|^{-1-2s} dz = [(x-P_l)^{-2s} + (P_r-x)^{-2s}]/(2s).
Then

    a(u, v) = C/2 Σ_K I_KK + C Σ_{K~K'} I_KK' + C Σ_K ∫_K uv κ_K
              - C Σ_{(K,K') far} ∬_{K×K'} u(x) v(z) |x-z|^{-1-2s}

with I the double integral of the difference quotient over a self or an
adjacent pair and 'far' meaning non-adjacent ordered pairs. Self and adjacent
pairs are integrated after a Duffy split that factors the singularity into
Gauss-Jacobi weights, so the polynomial part is integrated exactly.
"""

from typing import Optional

import numpy as np
from numpy.polynomial import Polynomial

from ..common.common import logger
from ..common.timing import MeasureTime
from .fem1d import FESpace1D, Mesh1D
from .params import FractionalParams
from .quadrature import gauss_jacobi, gauss_legendre


def _divided_difference(coeffs:np.ndarray, xi:np.ndarray, eta:np.ndarray)->np.ndarray:
    """(q(xi) - q(eta))/(xi - eta) for q = Σ c_k t^k, exactly, per row of coeffs.
    Returns shape (n_funcs, n_points)."""
    out = np.zeros((coeffs.shape[0], len(xi)))
    for k in range(1, coeffs.shape[1]):
        acc = np.zeros(len(xi))
        for m in range(k):
            acc += xi**m * eta**(k-1-m)
        out += np.outer(coeffs[:, k], acc)
    return out

def _reference_self(space:FESpace1D, s:float)->np.ndarray:
    """∬_{[0,1]²} (q_i(ξ)-q_i(η))(q_j(ξ)-q_j(η)) |ξ-η|^{-1-2s}.

    On η < ξ put η = ξ(1-y): the integrand is ξ^{2-2s} y^{1-2s} D_i D_j with D
    the divided difference of q, a polynomial."""
    p = space.degree
    rx = gauss_jacobi(2.0 - 2*s, p + 2, (0.0, 1.0))
    ry = gauss_jacobi(1.0 - 2*s, p + 2, (0.0, 1.0))
    xi = np.repeat(rx.nodes, len(ry.nodes))
    y = np.tile(ry.nodes, len(rx.nodes))
    w = np.repeat(rx.weights, len(ry.nodes)) * np.tile(ry.weights, len(rx.nodes))
    d = _divided_difference(space.basis.coeffs, xi, xi*(1.0 - y))
    return 2.0 * (d * w[None, :]) @ d.T

def _flip(coeffs:np.ndarray)->np.ndarray:
    """Monomial coefficients of q(1 - a) in a, per row."""
    out = np.zeros_like(coeffs)
    mirror = Polynomial([1.0, -1.0])
    for j in range(coeffs.shape[0]):
        c = Polynomial(coeffs[j])(mirror).coef
        out[j, :len(c)] = c
    return out

def _shifted_quotient(coeffs:np.ndarray, xi:np.ndarray, scale:np.ndarray)->np.ndarray:
    """(q(ξ·scale) - q(0))/ξ per row, q = Σ c_k t^k."""
    out = np.zeros((coeffs.shape[0], len(xi)))
    for k in range(1, coeffs.shape[1]):
        out += np.outer(coeffs[:, k], scale**k * xi**(k-1))
    return out

def _adjacent_pair(ca:np.ndarray, cb:np.ndarray, h1:float, h2:float, s:float,
                   rx, reta)->np.ndarray:
    """∬_{K×K'} (φ_i(x)-φ_i(z))(φ_j(x)-φ_j(z)) |x-z|^{-1-2s} for K = [x_k - h1, x_k],
    K' = [x_k, x_k + h2]. With x = x_k - h1 a, z = x_k + h2 b, ca (cb) hold the
    coefficients of every pair function on K in a (on K' in b).

    Triangle b < a: b = a η, |x - z| = a(h1 + h2 η); triangle a < b: a = b η,
    |x - z| = b(h1 η + h2). The numerator vanishes linearly in the radial
    variable and is divided out exactly."""
    xi = np.repeat(rx.nodes, len(reta.nodes))
    eta = np.tile(reta.nodes, len(rx.nodes))
    w = np.repeat(rx.weights, len(reta.nodes)) * np.tile(reta.weights, len(rx.nodes))
    ones = np.ones_like(eta)

    # b < a: φ(x) - φ(z) = pa(ξ) - pb(ξη)
    g1 = _shifted_quotient(ca, xi, ones) - _shifted_quotient(cb, xi, eta)
    w1 = w * (h1 + h2*eta)**(-1.0 - 2*s)
    # a < b: pa(τη) - pb(τ)
    g2 = _shifted_quotient(ca, xi, eta) - _shifted_quotient(cb, xi, ones)
    w2 = w * (h1*eta + h2)**(-1.0 - 2*s)
    return h1*h2 * ((g1*w1[None, :]) @ g1.T + (g2*w2[None, :]) @ g2.T)

def _boundary_kappa(space:FESpace1D, h:float, side:str, s:float)->np.ndarray:
    """∫_K q_i q_j d^{-2s}/(2s) on an end element, d the distance to the end
    vertex. Shape functions vanishing there are q = ξ r (left) or (1-ξ) r
    (right), which turns the weight into an integrable ξ^{2-2s}. The row of
    the end vertex itself is left zero, it is not a free dof."""
    p = space.basis.degree
    coeffs = space.basis.coeffs
    keep = list(range(1, p + 1)) if side == 'left' else list(range(0, p))
    r = np.zeros((p + 1, p + 1))
    for j in keep:
        if side == 'left':
            r[j, :p] = coeffs[j, 1:]
        else:
            quot = (Polynomial(coeffs[j]) // Polynomial([1.0, -1.0])).coef
            r[j, :len(quot)] = quot
    rule = gauss_jacobi(2.0 - 2*s, p + 1, (0.0, 1.0), side=side)
    vals = np.zeros((len(rule.nodes), p + 1))
    for k in range(p + 1):
        vals += np.outer(rule.nodes**k, r[:, k])
    return h**(1 - 2*s) * (vals * rule.weights[:, None]).T @ vals / (2*s)

def _near_points(dist_ratio:float, p:int)->int:
    """Gauss points for an element whose kernel singularity sits dist_ratio
    element lengths away."""
    return 2*p + 8 if dist_ratio >= 1.0 else 2*p + 24

@MeasureTime
def assemble_full(space:FESpace1D, params:FractionalParams, n_far:Optional[int]=None,
                  chunk:int=1024)->np.ndarray:
    """Matrix over all dofs of the space (end vertices included)."""
    mesh, p, s, C = space.mesh, space.degree, params.s, params.C_ds
    nodes, h, n_el = mesh.nodes, mesh.h, mesh.n_elements
    N = space.n_dofs
    A = np.zeros((N, N))
    loc = np.arange(p + 1)

    # self pairs scale as h^{1-2s}
    ref_self = _reference_self(space, s)
    for e in range(n_el):
        dofs = e*p + loc
        A[np.ix_(dofs, dofs)] += 0.5*C * h[e]**(1 - 2*s) * ref_self

    # adjacent pairs
    if n_el > 1:
        rx = gauss_jacobi(2.0 - 2*s, p + 2, (0.0, 1.0))
        reta = gauss_legendre(2*p + 14)
        ca_loc = _flip(space.basis.coeffs)      # on K in the variable a = 1 - ξ
        cb_loc = space.basis.coeffs             # on K' in b = ξ
        for e in range(n_el - 1):
            dofs = e*p + np.arange(2*p + 1)
            ca = np.zeros((2*p + 1, p + 1))
            cb = np.zeros((2*p + 1, p + 1))
            ca[:p+1] = ca_loc
            cb[p:] = cb_loc
            A[np.ix_(dofs, dofs)] += C * _adjacent_pair(ca, cb, h[e], h[e+1], s, rx, reta)

    # κ_K terms; on boundary elements the factor (x - a)^{-2s} meets the end
    # vertex and is divided into the vanishing shape functions exactly
    for e in range(n_el):
        a, b = nodes[e], nodes[e+1]
        pl, pr = nodes[max(e-1, 0)], nodes[min(e+2, n_el)]
        dofs = e*p + loc
        local = np.zeros((p + 1, p + 1))
        for side, pt in (('left', pl), ('right', pr)):
            dist = (a - pl) if side == 'left' else (pr - b)
            if dist == 0.0:
                local += _boundary_kappa(space, h[e], side, s)
                continue
            rule = gauss_legendre(_near_points(dist/h[e], p), (a, b))
            base = (rule.nodes - pt) if side == 'left' else (pt - rule.nodes)
            weights = rule.weights * base**(-2*s) / (2*s)
            q = space.basis.eval((rule.nodes - a)/h[e])
            local += (q * weights[:, None]).T @ q
        A[np.ix_(dofs, dofs)] += C * local

    # far pairs, kernel masked on self and adjacent element pairs
    if n_el > 2:
        nf = n_far or max(2*p + 6, 10)
        rule = gauss_legendre(nf)
        q = space.basis.eval(rule.nodes)
        xq = (nodes[:-1, None] + np.outer(h, rule.nodes)).ravel()
        wq = (h[:, None] * rule.weights[None, :]).ravel()
        eq = np.repeat(np.arange(n_el), nf)
        nq = len(xq)
        # B[i, k] = w_k φ_i(x_k)
        B = np.zeros((N, nq))
        for j in range(p + 1):
            B[eq*p + j, np.arange(nq)] = np.tile(q[:, j], n_el) * wq
        F = np.zeros((N, N))
        for c0 in range(0, nq, chunk):
            c1 = min(c0 + chunk, nq)
            dist = np.abs(xq[:, None] - xq[None, c0:c1])
            far = np.abs(eq[:, None] - eq[None, c0:c1]) > 1
            K = np.zeros_like(dist)
            K[far] = dist[far]**(-1.0 - 2*s)
            F += B @ (K @ B[:, c0:c1].T)
        A -= C * F

    A = 0.5*(A + A.T)
    logger.debug({'assembled_dofs': N, 'n_elements': n_el, 'degree': p, 's': s}, exists_ok=True)
    return A

def assemble_bilinear_1d(mesh:Mesh1D, degree:int, params:FractionalParams,
                         n_far:Optional[int]=None)->np.ndarray:
    """Symmetric positive definite matrix of a(·,·) on the free dofs of the
    continuous P_degree space vanishing at and outside the mesh ends."""
    space = FESpace1D(mesh, degree)
    A = assemble_full(space, params, n_far)
    free = space.free_dofs
    return A[np.ix_(free, free)]

def coercivity_constant(A:np.ndarray, M:np.ndarray)->float:
    """Smallest generalized eigenvalue of A x = λ M x, the measured discrete
    coercivity constant of a(·,·) against the L² mass matrix M."""
    from scipy.linalg import eigh
    return float(eigh(A, M, eigvals_only=True, subset_by_index=[0, 0])[0])
