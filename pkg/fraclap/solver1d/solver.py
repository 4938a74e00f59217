# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

from typing import Optional, Tuple

import numpy as np
from overrides import overrides
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.sparse.linalg import cg

from ..common.common import logger
from ..common.errors import DomainError, SolverError
from ..common.timing import MeasureBlockTime
from ..fields.scalar_field import ScalarField
from ..fracops.bilinear import assemble_bilinear_1d
from ..fracops.fem1d import FESpace1D, Mesh1D
from ..fracops.params import FractionalParams


PROVENANCES = ('direct', 'trace-of-extension', 'analytic')

# dense Cholesky up to this many unknowns, CG above
DENSE_LIMIT = 2000


class DiscreteSolution(ScalarField):
    """Continuous P_degree function on `mesh`, zero at and outside the mesh ends.

    `coeffs` holds all dofs of FESpace1D(mesh, degree), end vertices included
    (and zero there). `matrix` and `load` are the free-dof system it solves,
    kept for energy errors and Galerkin orthogonality checks."""
    def __init__(self, mesh:Mesh1D, degree:int, coeffs:np.ndarray, params:FractionalParams,
                 provenance:str='direct', residual:float=0.0, energy:Optional[float]=None,
                 matrix:Optional[np.ndarray]=None, load:Optional[np.ndarray]=None,
                 data:Optional[ScalarField]=None) -> None:
        if provenance not in PROVENANCES:
            raise DomainError(f'unknown provenance "{provenance}"')
        coeffs = np.asarray(coeffs, dtype=float)
        space = FESpace1D(mesh, degree)
        if coeffs.shape != (space.n_dofs,):
            raise DomainError(f'expected {space.n_dofs} coefficients, got {coeffs.shape}')
        if not np.all(np.isfinite(coeffs)):
            raise SolverError('solution coefficients are not finite')
        super().__init__(1, 'discrete', degree, (mesh.nodes[:1], mesh.nodes[-1:]), mesh.h_min)
        self.mesh, self.degree, self.params = mesh, degree, params
        self.space = space
        self.coeffs = coeffs
        self.coeffs.setflags(write=False)
        self.provenance = provenance
        self.residual = residual
        self.matrix, self.load, self.data = matrix, load, data
        self.energy = float(self.free_coeffs @ matrix @ self.free_coeffs) \
            if energy is None and matrix is not None else energy

    @property
    def free_coeffs(self)->np.ndarray:
        return self.coeffs[self.space.free_dofs]

    @property
    def interval(self)->Tuple[float, float]:
        return self.mesh.interval

    def breakpoints(self)->np.ndarray:
        return self.mesh.nodes

    @overrides
    def _partial(self, pts:np.ndarray, beta:Tuple[int, ...])->np.ndarray:
        return self.space.evaluate(self.coeffs, pts[:, 0], beta[0])

    def sample(self, n:int=201)->Tuple[np.ndarray, np.ndarray]:
        """Values on a uniform grid of n points over the mesh interval."""
        x = np.linspace(*self.mesh.interval, n)
        return x, self.value(x)


def _solve_spd(A:np.ndarray, b:np.ndarray, tol:float)->np.ndarray:
    if len(b) <= DENSE_LIMIT:
        try:
            return cho_solve(cho_factor(A), b)
        except LinAlgError as e:
            raise SolverError(f'Galerkin matrix is not positive definite ({e}); assembly is broken') from e
    # Jacobi-scaled CG; the matrix is dense so the scaling is the only preconditioner
    d = np.sqrt(np.diag(A))
    if np.any(d <= 0):
        raise SolverError('Galerkin matrix has a non-positive diagonal')
    As = A / d[:, None] / d[None, :]
    bs = b / d
    try:
        x, info = cg(As, bs, rtol=tol, maxiter=10*len(b))
    except TypeError:
        # scipy < 1.12 names the relative tolerance `tol`
        x, info = cg(As, bs, tol=tol, maxiter=10*len(b))
    if info != 0:
        raise SolverError(f'conjugate gradients did not converge (info={info})')
    return x / d

def solve_dirichlet_1d(f:ScalarField, params:FractionalParams, mesh:Mesh1D, degree:int=1,
                       tol:float=1e-10, n_quad:Optional[int]=None)->DiscreteSolution:
    """Galerkin solution of (-Δ)^s u = f on the mesh interval with u = 0 outside."""
    if params.d != 1 or f.dim != 1:
        raise DomainError('the direct solver is one dimensional')
    space = FESpace1D(mesh, degree)
    if len(space.free_dofs) == 0:
        raise DomainError('mesh has no interior degrees of freedom')

    with MeasureBlockTime('solve_dirichlet_1d'):
        A = assemble_bilinear_1d(mesh, degree, params)
        b = space.load_vector(f.value, n_quad)[space.free_dofs]
        if not np.all(np.isfinite(b)):
            raise SolverError('load vector is not finite, the data is not integrable against the basis')
        x = _solve_spd(A, b, tol) if np.any(b) else np.zeros_like(b)

    bnorm = float(np.linalg.norm(b))
    residual = float(np.linalg.norm(A @ x - b)) / bnorm if bnorm > 0 else 0.0
    sol = DiscreteSolution(mesh, degree, space.expand(x), params, 'direct', residual,
                           matrix=A, load=b, data=f)
    logger.info({'solve_dirichlet_1d': {'s': params.s, 'n_elements': mesh.n_elements,
                 'degree': degree, 'unknowns': len(b), 'residual': residual, 'energy': sol.energy}}, exists_ok=True)
    return sol

def galerkin_defect(sol:DiscreteSolution)->float:
    """max_i |a(u_h, φ_i) - ⟨f, φ_i⟩| relative to max |⟨f, φ_i⟩|."""
    if sol.matrix is None or sol.load is None:
        raise DomainError('solution carries no linear system')
    scale = max(float(np.max(np.abs(sol.load))), np.finfo(float).tiny)
    return float(np.max(np.abs(sol.matrix @ sol.free_coeffs - sol.load))) / scale
