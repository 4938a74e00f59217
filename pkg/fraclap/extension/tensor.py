# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Tensor product discretization of the truncated half space box × (0, Y).

Coefficients are stored as an array of shape (N_1, [N_2,] N_y) in C order, so
the flat index matches scipy's Kronecker products with the y factor last.
"""

from functools import reduce
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from ..common.errors import DomainError
from ..fracops.fem1d import FESpace1D, Mesh1D
from ..fracops.quadrature import composite_gauss
from ..geometry.polygon import Polygon
from .ymesh import weighted_matrices, weighted_rule


TOmega = Union[Tuple[float, float], Polygon]


def trace_mesh_1d(omega_mesh:Mesh1D, margin:float, growth:float=1.25)->Mesh1D:
    """Extends a mesh of Ω by `margin` on both sides with cells growing
    geometrically from the end cells of Ω's mesh."""
    if not margin > 0:
        raise DomainError(f'box margin {margin} must be positive')
    if not growth >= 1.0:
        raise DomainError(f'growth factor {growth} must be at least 1')
    a, b = omega_mesh.interval
    h = omega_mesh.h

    def outward(h0:float)->List[float]:
        steps, total = [], 0.0
        while total < margin*(1 - 1e-12):
            h0 = min(h0*growth, margin - total) if growth > 1 else min(h0, margin - total)
            # avoid a sliver as the last cell
            if margin - total - h0 < 0.5*h0:
                h0 = margin - total
            steps.append(h0)
            total += h0
        return steps

    left = a - np.cumsum(outward(float(h[0])))
    right = b + np.cumsum(outward(float(h[-1])))
    return Mesh1D(np.concatenate([left[::-1], omega_mesh.nodes, right]))

def box_grid(polygon:Polygon, n:int, margin:float, growth:float=1.25)->Tuple[Mesh1D, Mesh1D]:
    """Axis meshes of a quadrilateral grid: n uniform cells across the longer
    side of the polygon's bounding box, extended by `margin` around it."""
    lo, hi = polygon.bbox
    h = float(np.max(hi - lo))/n
    meshes = []
    for k in range(2):
        m = max(1, int(np.ceil((hi[k] - lo[k])/h - 1e-9)))
        meshes.append(trace_mesh_1d(Mesh1D(np.linspace(lo[k], hi[k], m + 1)), margin, growth))
    return meshes[0], meshes[1]


class TensorDiscretization:
    """P_degree in every trace direction times P1 in y, with y^α weights."""
    def __init__(self, x_meshes:Sequence[Mesh1D], y_mesh:Mesh1D, alpha:float,
                 degree:int=1, n_gauss:int=12) -> None:
        if len(x_meshes) not in (1, 2):
            raise DomainError(f'trace dimension {len(x_meshes)} must be 1 or 2')
        if len(x_meshes) == 2 and degree != 1:
            raise DomainError('the two dimensional trace grid is bilinear only')
        if y_mesh.interval[0] != 0.0:
            raise DomainError('the y mesh must start at 0')
        self.d = len(x_meshes)
        self.x_spaces = [FESpace1D(m, degree) for m in x_meshes]
        self.y_mesh = y_mesh
        self.y_space = FESpace1D(y_mesh, 1)
        self.alpha, self.degree, self.n_gauss = float(alpha), degree, n_gauss
        self.Mx = [s.mass_matrix() for s in self.x_spaces]
        self.Kx = [s.stiffness_matrix() for s in self.x_spaces]
        self.My, self.Ky = weighted_matrices(y_mesh, self.alpha, n_gauss=n_gauss)
        self._K:Optional[sp.csr_matrix] = None
        # operators reused across an ensemble of fields on this discretization
        self.cache:dict = {}

    @property
    def shape(self)->Tuple[int, ...]:
        return tuple(s.n_dofs for s in self.x_spaces) + (self.y_space.n_dofs,)

    @property
    def size(self)->int:
        return int(np.prod(self.shape))

    @property
    def Y(self)->float:
        return self.y_mesh.interval[1]

    def x_coords(self)->List[np.ndarray]:
        return [s.dof_coords() for s in self.x_spaces]

    def trace_points(self)->np.ndarray:
        """Coordinates of the trace dofs, shape (N_1[·N_2], d) in C order."""
        grids = np.meshgrid(*self.x_coords(), indexing='ij')
        return np.stack([g.ravel() for g in grids], axis=1)

    def _kron(self, x_factors:Sequence[sp.spmatrix], y_factor:sp.spmatrix)->sp.csr_matrix:
        return sp.kron(reduce(lambda a, b: sp.kron(a, b, format='csr'), x_factors),
                       y_factor, format='csr')

    def stiffness(self)->sp.csr_matrix:
        """∫ y^α ∇U·∇V over box × (0, Y)."""
        if self._K is not None:
            return self._K
        terms = []
        for k in range(self.d):
            x_factors = [self.Kx[j] if j == k else self.Mx[j] for j in range(self.d)]
            terms.append(self._kron(x_factors, self.My))
        terms.append(self._kron(self.Mx, self.Ky))
        self._K = reduce(lambda a, b: a + b, terms).tocsr()
        return self._K

    def mass(self, upper:Optional[float]=None)->sp.csr_matrix:
        """∫ y^α U V over box × (0, upper)."""
        My = self.My if upper is None else weighted_matrices(self.y_mesh, self.alpha, upper,
                                                             self.n_gauss)[0]
        return self._kron(self.Mx, My)

    def y_matrices(self, upper:Optional[float]=None)->Tuple[sp.csr_matrix, sp.csr_matrix]:
        if upper is None:
            return self.My, self.Ky
        return weighted_matrices(self.y_mesh, self.alpha, upper, self.n_gauss)

    def trace_mask(self, omega:TOmega)->np.ndarray:
        """Trace dofs whose basis function is supported in closure(Ω), shape
        (N_1[, N_2]). Ω is an interval (d = 1) or a polygon (d = 2)."""
        if self.d == 1:
            a, b = omega
            x = self.x_coords()[0]
            return (x > a) & (x < b)
        if not isinstance(omega, Polygon):
            raise DomainError('a two dimensional trace needs a polygon')
        nodes = [s.mesh.nodes for s in self.x_spaces]
        mask = np.zeros(self.shape[:-1], dtype=bool)
        t = np.linspace(0.0, 1.0, 5)
        tol = 1e-12*omega.diameter
        for i in range(1, len(nodes[0]) - 1):
            xs = nodes[0][i-1] + (nodes[0][i+1] - nodes[0][i-1])*t
            for j in range(1, len(nodes[1]) - 1):
                ys = nodes[1][j-1] + (nodes[1][j+1] - nodes[1][j-1])*t
                pts = np.stack([np.repeat(xs, len(ys)), np.tile(ys, len(xs))], axis=1)
                inside = omega.contains(pts) | (omega.boundary_distance(pts) <= tol)
                mask[i, j] = bool(np.all(inside))
        return mask

    def lateral_mask(self)->np.ndarray:
        """Trace dofs on the boundary of the box, shape (N_1[, N_2])."""
        mask = np.zeros(self.shape[:-1], dtype=bool)
        for k in range(self.d):
            idx = [slice(None)]*self.d
            idx[k] = 0
            mask[tuple(idx)] = True
            idx[k] = -1
            mask[tuple(idx)] = True
        return mask

    def x_quadrature(self, n:Optional[int]=None)->Tuple[np.ndarray, np.ndarray, List[sp.csr_matrix]]:
        """Tensor Gauss points of the box (shape (m, d)), their weights and
        the per-axis basis value matrices at the axis points."""
        nq = n or self.degree + 3
        axes, weights, bases = [], [], []
        for s in self.x_spaces:
            x, w = composite_gauss(s.mesh.nodes, nq)
            axes.append(x)
            weights.append(w)
            bases.append(s.basis_values(x))
        grids = np.meshgrid(*axes, indexing='ij')
        wgrid = reduce(np.multiply.outer, weights)
        return np.stack([g.ravel() for g in grids], axis=1), np.asarray(wgrid).ravel(), bases

    def y_quadrature(self, exponent:float, upper:Optional[float]=None)->Tuple[np.ndarray, np.ndarray]:
        return weighted_rule(self.y_mesh, exponent, upper, self.n_gauss)

    def project_load(self, values:np.ndarray, wx:np.ndarray, bases:Sequence[sp.csr_matrix],
                     wy:Optional[np.ndarray]=None, By:Optional[sp.csr_matrix]=None)->np.ndarray:
        """Σ_q w_q g(q) φ_i(q) for tensor quadrature data `values` of shape
        (m_1[, m_2][, m_y]); returns an array of the coefficient shape without
        the y axis when wy is None."""
        shape = tuple(b.shape[0] for b in bases) + ((len(wy),) if wy is not None else ())
        g = np.asarray(values, dtype=float).reshape(shape)
        g = g * wx.reshape(shape[:self.d] + ((1,) if wy is not None else ()))
        if wy is not None:
            g = g * wy
        for k, B in enumerate(bases):
            g = np.moveaxis(np.tensordot(B.T.toarray(), g, axes=([1], [k])), 0, k)
        if wy is not None:
            g = np.tensordot(g, By.toarray(), axes=([self.d], [0]))
        return g

    def evaluate(self, coeffs:np.ndarray, pts:np.ndarray, beta:Sequence[int])->np.ndarray:
        """Σ C[i.., j] ∂^beta(φ_i.. ψ_j) at points (n, d+1)."""
        C = np.asarray(coeffs).reshape(self.shape)
        Bs = [s.basis_values(pts[:, k], beta[k]) for k, s in enumerate(self.x_spaces)]
        By = self.y_space.basis_values(pts[:, -1], beta[-1])
        T = Bs[0] @ C.reshape(self.shape[0], -1)
        if self.d == 1:
            return np.asarray(By.multiply(T).sum(axis=1)).ravel()
        T = T.reshape(len(pts), self.shape[1], self.shape[2])
        return np.einsum('nj,njk,nk->n', Bs[1].toarray(), T, By.toarray())
