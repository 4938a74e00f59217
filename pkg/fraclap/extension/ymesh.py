# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Meshes and y^α weighted matrices in the extension variable."""

import math
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp

from ..common.errors import DomainError
from ..fracops.fem1d import FESpace1D, Mesh1D
from ..fracops.quadrature import gauss_jacobi, gauss_legendre


def y_mesh(Y:float, first:Optional[float]=None, ratio:float=0.5,
           max_cell:Optional[float]=None)->Mesh1D:
    """Nodes 0, first, first/ratio, first/ratio², ... toward y = 0, continued
    by uniform cells of size max_cell up to Y.

    Defaults: first = 1e-3·Y, max_cell = Y/64."""
    Y = float(Y)
    if not Y > 0:
        raise DomainError(f'truncation height Y={Y} must be positive')
    if not 0.0 < ratio < 1.0:
        raise DomainError(f'grading ratio {ratio} must lie in (0, 1)')
    first = 1e-3*Y if first is None else float(first)
    max_cell = Y/64 if max_cell is None else float(max_cell)
    if not 0 < first < Y or not max_cell > 0:
        raise DomainError(f'first cell {first} and max cell {max_cell} must be positive and below Y={Y}')

    nodes = [0.0, first]
    while nodes[-1] < Y:
        nxt = nodes[-1]/ratio
        if nxt - nodes[-1] > max_cell or nxt >= Y:
            break
        nodes.append(nxt)
    last = nodes[-1]
    if last < Y:
        n_uniform = max(1, int(math.ceil((Y - last)/max_cell - 1e-9)))
        nodes.extend(np.linspace(last, Y, n_uniform + 1)[1:].tolist())
    nodes[-1] = Y
    return Mesh1D(nodes)

def weighted_rule(mesh:Mesh1D, exponent:float, upper:Optional[float]=None,
                  n_gauss:int=12)->Tuple[np.ndarray, np.ndarray]:
    """Composite rule for ∫_0^upper y^exponent g(y) dy on the cells of `mesh`:
    Gauss-Jacobi on the cell touching 0, Gauss-Legendre times y^exponent on the
    others. `upper` defaults to the mesh end; cells are clipped at it."""
    a0, b0 = mesh.interval
    if a0 != 0.0:
        raise DomainError('the y mesh must start at 0')
    upper = b0 if upper is None else float(upper)
    if not 0.0 < upper <= b0*(1 + 1e-12):
        raise DomainError(f'upper limit {upper} must lie in (0, {b0}]')
    nodes, weights = [], []
    for e in range(mesh.n_elements):
        a, b = mesh.nodes[e], min(mesh.nodes[e + 1], upper)
        if b <= a:
            break
        if a == 0.0:
            rule = gauss_jacobi(exponent, n_gauss, (0.0, b))
            nodes.append(rule.nodes)
            weights.append(rule.weights)
        else:
            rule = gauss_legendre(n_gauss, (a, b))
            nodes.append(rule.nodes)
            weights.append(rule.weights*rule.nodes**exponent)
    return np.concatenate(nodes), np.concatenate(weights)

def weighted_matrices(mesh:Mesh1D, alpha:float, upper:Optional[float]=None,
                      n_gauss:int=12)->Tuple[sp.csr_matrix, sp.csr_matrix]:
    """P1 mass and stiffness matrices ∫ y^α φ_i φ_j and ∫ y^α φ_i' φ_j' over (0, upper)."""
    space = FESpace1D(mesh, 1)
    y, w = weighted_rule(mesh, alpha, upper, n_gauss)
    B = space.basis_values(y)
    D = space.basis_values(y, deriv=1)
    W = sp.diags(w)
    M = (B.T @ W @ B).tocsr()
    K = (D.T @ W @ D).tocsr()
    return M, K

def weighted_moment(Y:float, exponent:float, m:int=0)->float:
    """∫_0^Y y^{exponent+m} dy."""
    return Y**(exponent + m + 1)/(exponent + m + 1)
