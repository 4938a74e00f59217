# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Continuous piecewise polynomial spaces on one dimensional meshes."""

from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp

from ..common.errors import DomainError
from .quadrature import composite_gauss, gauss_legendre


class Mesh1D:
    def __init__(self, nodes) -> None:
        nodes = np.asarray(nodes, dtype=float)
        if nodes.ndim != 1 or len(nodes) < 2:
            raise DomainError('a mesh needs at least two nodes')
        if np.any(np.diff(nodes) <= 0):
            raise DomainError('mesh nodes must be strictly increasing')
        self.nodes = nodes
        self.nodes.setflags(write=False)

    @property
    def n_elements(self)->int:
        return len(self.nodes) - 1

    @property
    def interval(self)->Tuple[float, float]:
        return float(self.nodes[0]), float(self.nodes[-1])

    @property
    def h(self)->np.ndarray:
        return np.diff(self.nodes)

    @property
    def h_max(self)->float:
        return float(np.max(self.h))

    @property
    def h_min(self)->float:
        return float(np.min(self.h))

    def element_of(self, x:np.ndarray)->np.ndarray:
        """Index of the element holding each x, clipped to valid elements."""
        e = np.searchsorted(self.nodes, x, side='right') - 1
        return np.clip(e, 0, self.n_elements - 1)

    def refine(self)->'Mesh1D':
        mids = 0.5*(self.nodes[:-1] + self.nodes[1:])
        return Mesh1D(np.sort(np.concatenate([self.nodes, mids])))

    def __len__(self)->int:
        return self.n_elements


@lru_cache(maxsize=16)
def _lagrange_coeffs(degree:int)->np.ndarray:
    """Row j holds monomial coefficients of the j-th Lagrange shape function
    on [0, 1] with equispaced nodes j/degree."""
    ref = np.linspace(0.0, 1.0, degree + 1)
    vander = np.vander(ref, degree + 1, increasing=True)
    coeffs = np.linalg.inv(vander).T
    coeffs.setflags(write=False)
    return coeffs


class LagrangeBasis:
    """Shape functions q_0..q_p on the reference element [0, 1]."""
    def __init__(self, degree:int) -> None:
        if not 1 <= degree <= 8:
            raise DomainError(f'polynomial degree {degree} is not supported, use 1..8')
        self.degree = degree
        self.coeffs = _lagrange_coeffs(degree)

    def eval(self, xi:np.ndarray, deriv:int=0)->np.ndarray:
        """Array (len(xi), p+1) of d^deriv q_j / dxi^deriv."""
        xi = np.asarray(xi, dtype=float)
        p = self.degree
        out = np.zeros((len(xi), p + 1))
        for k in range(deriv, p + 1):
            fac = np.prod(np.arange(k - deriv + 1, k + 1)) if deriv else 1.0
            out += np.outer(fac * xi**(k - deriv), self.coeffs[:, k])
        return out


class FESpace1D:
    """Continuous P_p space on a mesh. Dof e·p + j is local node j of element
    e; vertices are shared. Free dofs exclude the two end vertices, so every
    function of the free space vanishes at and outside the mesh ends."""
    def __init__(self, mesh:Mesh1D, degree:int) -> None:
        self.mesh = mesh
        self.degree = degree
        self.basis = LagrangeBasis(degree)

    @property
    def n_dofs(self)->int:
        return self.mesh.n_elements*self.degree + 1

    @property
    def free_dofs(self)->np.ndarray:
        return np.arange(1, self.n_dofs - 1)

    def element_dofs(self, e:int)->np.ndarray:
        return e*self.degree + np.arange(self.degree + 1)

    def dof_coords(self)->np.ndarray:
        p, nodes = self.degree, self.mesh.nodes
        loc = np.linspace(0.0, 1.0, p + 1)[:-1]
        pts = (nodes[:-1, None] + np.outer(self.mesh.h, loc)).ravel()
        return np.append(pts, nodes[-1])

    def expand(self, free_coeffs:np.ndarray)->np.ndarray:
        full = np.zeros(self.n_dofs)
        full[self.free_dofs] = free_coeffs
        return full

    def evaluate(self, coeffs:np.ndarray, x, deriv:int=0)->np.ndarray:
        """Value (or derivative) of Σ coeffs[i] φ_i at x, zero outside the mesh.
        Derivatives at a vertex are taken from the element to its right."""
        x = np.asarray(x, dtype=float).ravel()
        a, b = self.mesh.interval
        out = np.zeros(len(x))
        inside = (x >= a) & (x <= b)
        if not np.any(inside):
            return out
        xs = x[inside]
        e = self.mesh.element_of(xs)
        h = self.mesh.h[e]
        xi = (xs - self.mesh.nodes[e]) / h
        p = self.degree
        # (n, p+1) shape values times local coefficients
        vals = np.zeros(len(xs))
        for j in range(p + 1):
            c = coeffs[e*p + j]
            qj = np.zeros(len(xs))
            for k in range(deriv, p + 1):
                fac = np.prod(np.arange(k - deriv + 1, k + 1)) if deriv else 1.0
                qj += fac * self.basis.coeffs[j, k] * xi**(k - deriv)
            vals += c * qj
        out[inside] = vals / h**deriv
        return out

    def basis_values(self, x, deriv:int=0)->sp.csr_matrix:
        """Sparse (len(x), n_dofs) matrix of d^deriv φ_i(x); rows of points
        outside the mesh are empty."""
        x = np.asarray(x, dtype=float).ravel()
        a, b = self.mesh.interval
        inside = np.flatnonzero((x >= a) & (x <= b))
        e = self.mesh.element_of(x[inside])
        h = self.mesh.h[e]
        q = self.basis.eval((x[inside] - self.mesh.nodes[e]) / h, deriv) / h[:, None]**deriv
        p1 = self.degree + 1
        rows = np.repeat(inside, p1)
        cols = (e[:, None]*self.degree + np.arange(p1)[None, :]).ravel()
        return sp.csr_matrix((q.ravel(), (rows, cols)), shape=(len(x), self.n_dofs))

    def quadrature(self, n:Optional[int]=None)->Tuple[np.ndarray, np.ndarray]:
        return composite_gauss(self.mesh.nodes, n or self.degree + 2)

    def mass_matrix(self)->sp.csr_matrix:
        return self._element_matrix(0)

    def stiffness_matrix(self)->sp.csr_matrix:
        return self._element_matrix(1)

    def load_vector(self, f, n:Optional[int]=None)->np.ndarray:
        """∫ f φ_i for every dof; f maps an array of points to values."""
        nq = n or 2*self.degree + 6
        rule = gauss_legendre(nq)
        q = self.basis.eval(rule.nodes)
        out = np.zeros(self.n_dofs)
        nodes, h = self.mesh.nodes, self.mesh.h
        pts = nodes[:-1, None] + np.outer(h, rule.nodes)
        fv = np.asarray(f(pts.ravel()), dtype=float).reshape(pts.shape)
        local = (fv * rule.weights[None, :] * h[:, None]) @ q
        for j in range(self.degree + 1):
            np.add.at(out, np.arange(self.mesh.n_elements)*self.degree + j, local[:, j])
        return out

    def _element_matrix(self, deriv:int)->sp.csr_matrix:
        p = self.degree
        rule = gauss_legendre(p + 2)
        q = self.basis.eval(rule.nodes, deriv)
        ref = (q * rule.weights[:, None]).T @ q
        h = self.mesh.h
        scale = h**(1 - 2*deriv)
        rows, cols, vals = [], [], []
        loc = np.arange(p + 1)
        for e in range(self.mesh.n_elements):
            dofs = e*p + loc
            rows.append(np.repeat(dofs, p + 1))
            cols.append(np.tile(dofs, p + 1))
            vals.append((scale[e]*ref).ravel())
        return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                             shape=(self.n_dofs, self.n_dofs))
