# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Weighted Galerkin solver for the truncated extension problem

    minimize ½ b(U, U) - ∫ F U - ∫_Ω f tr U,   b(U, V) = ∫ y^α ∇U·∇V,

over tensor P_p ⊗ P1 functions on box × (0, Y) that vanish on the lateral
boundary of the box, at y = Y, and whose trace vanishes outside Ω.
"""

from itertools import product
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
from overrides import overrides
from scipy.sparse.linalg import LinearOperator, cg, spsolve

from ..common.artifacts import ArtifactHeader, write_csv
from ..common.common import logger
from ..common.errors import DomainError, SolverError
from ..common.timing import MeasureBlockTime
from ..common.utils import make_rng
from ..fields.scalar_field import ScalarField
from ..fracops.fem1d import Mesh1D
from ..fracops.params import FractionalParams
from ..geometry.polygon import Polygon
from ..solver1d.solver import DiscreteSolution
from .tensor import TensorDiscretization, TOmega
from .ymesh import y_mesh as default_y_mesh


# sparse direct solve up to this many unknowns, preconditioned CG above
DIRECT_LIMIT = 60_000

TTraceMesh = Union[Mesh1D, Sequence[Mesh1D]]


class ExtensionField(ScalarField):
    """Discrete U(x, y) on box × (0, Y); points are (x_1, [x_2,] y).

    `coeffs` has the tensor shape of `disc`, nodal values for Lagrange bases.
    The field is immutable once built; `with_coeffs` makes a sibling on the
    same discretization."""
    def __init__(self, disc:TensorDiscretization, coeffs:np.ndarray, params:FractionalParams,
                 omega:TOmega, f:Optional[ScalarField]=None, F:Optional[ScalarField]=None,
                 H:Optional[float]=None, residual:float=0.0, load:Optional[np.ndarray]=None,
                 free:Optional[np.ndarray]=None, provenance:str='solve') -> None:
        coeffs = np.array(coeffs, dtype=float).reshape(disc.shape)
        if not np.all(np.isfinite(coeffs)):
            raise SolverError('extension coefficients are not finite')
        lo = [s.mesh.interval[0] for s in disc.x_spaces] + [0.0]
        hi = [s.mesh.interval[1] for s in disc.x_spaces] + [disc.Y]
        res = min([s.mesh.h_min for s in disc.x_spaces] + [disc.y_mesh.h_min])
        super().__init__(disc.d + 1, 'discrete', 1, (lo, hi), res)
        self.disc, self.params, self.omega = disc, params, omega
        self.coeffs = coeffs
        self.coeffs.setflags(write=False)
        self.f, self.F = f, F
        self.H = 0.5*disc.Y if H is None else float(H)
        if self.H > disc.Y:
            raise SolverError(f'truncation height Y={disc.Y} is below the support height H={self.H}')
        self.residual, self.load, self.free = residual, load, free
        self.provenance = provenance
        c = coeffs.ravel()
        self.energy = float(c @ (disc.stiffness() @ c))
        if not np.isfinite(self.energy):
            raise SolverError('discrete energy is not finite')

    @property
    def d(self)->int:
        return self.disc.d

    @property
    def Y(self)->float:
        return self.disc.Y

    @property
    def y_mesh(self)->Mesh1D:
        return self.disc.y_mesh

    @overrides
    def _partial(self, pts:np.ndarray, beta:Tuple[int, ...])->np.ndarray:
        return self.disc.evaluate(self.coeffs, pts, beta)

    def with_coeffs(self, coeffs:np.ndarray, provenance:str='derived')->'ExtensionField':
        return ExtensionField(self.disc, coeffs, self.params, self.omega, H=self.H,
                              provenance=provenance)

    def level(self, k:int)->np.ndarray:
        """Nodal values at the k-th y node, shape of the trace grid."""
        return self.coeffs[..., k]

    def trace_mask(self)->np.ndarray:
        return self.disc.trace_mask(self.omega)

    def omega_mesh(self)->Tuple[Mesh1D, int, int]:
        """Sub-mesh of the trace mesh covering Ω (d = 1) and its end node indices."""
        if self.d != 1:
            raise DomainError('Ω sub-meshes exist for one dimensional traces only')
        nodes = self.disc.x_spaces[0].mesh.nodes
        i0, i1 = _node_index(nodes, self.omega[0]), _node_index(nodes, self.omega[1])
        return Mesh1D(nodes[i0:i1+1]), i0, i1

    def trace(self)->DiscreteSolution:
        """tr U on Ω as a one dimensional Galerkin function."""
        mesh, i0, i1 = self.omega_mesh()
        p = self.disc.degree
        coeffs = self.coeffs[i0*p:i1*p + 1, 0].copy()
        coeffs[0] = coeffs[-1] = 0.0
        return DiscreteSolution(mesh, p, coeffs, self.params, 'trace-of-extension', data=self.f)

    def euler_lagrange_defect(self)->float:
        """max |b(U, V_i) - ℓ(V_i)| over free basis functions, relative to max |ℓ(V_i)|."""
        if self.load is None or self.free is None:
            raise DomainError('field carries no linear system')
        r = (self.disc.stiffness() @ self.coeffs.ravel() - self.load.ravel())[self.free.ravel()]
        scale = max(float(np.max(np.abs(self.load))), np.finfo(float).tiny)
        return float(np.max(np.abs(r)))/scale

    def slice_rows(self, levels:Optional[Sequence[int]]=None)->List[Tuple[float, ...]]:
        """(x.., y, U) at the trace dofs for the given y node indices."""
        ys = self.y_mesh.nodes
        levels = range(len(ys)) if levels is None else levels
        pts = self.disc.trace_points()
        rows = []
        for k in levels:
            vals = self.level(k).ravel()
            for p, v in zip(pts, vals):
                rows.append(tuple(p) + (float(ys[k]), float(v)))
        return rows

    def write_slices_csv(self, filepath:str, header:ArtifactHeader,
                         levels:Optional[Sequence[int]]=None)->str:
        cols = ['x', 'y', 'U'] if self.d == 1 else ['x1', 'x2', 'y', 'U']
        return write_csv(filepath, header, cols, self.slice_rows(levels))


def _node_index(nodes:np.ndarray, x:float)->int:
    i = int(np.argmin(np.abs(nodes - x)))
    if abs(nodes[i] - x) > 1e-12*max(1.0, abs(x)):
        raise DomainError(f'Ω end point {x} is not a node of the trace mesh')
    return i

def _as_meshes(trace_mesh:TTraceMesh)->List[Mesh1D]:
    return [trace_mesh] if isinstance(trace_mesh, Mesh1D) else list(trace_mesh)

def _omega_diameter(omega:TOmega)->float:
    if isinstance(omega, Polygon):
        return omega.diameter
    return float(omega[1] - omega[0])

def _box_omega(meshes:Sequence[Mesh1D])->TOmega:
    if len(meshes) == 1:
        return meshes[0].interval
    (a, b), (c, d) = meshes[0].interval, meshes[1].interval
    return Polygon([[a, c], [b, c], [b, d], [a, d]], name='box')

def _resolve_y_mesh(y_mesh:Optional[Mesh1D], Y:Optional[float], diam:float)->Mesh1D:
    if y_mesh is not None:
        if Y is not None and abs(y_mesh.interval[1] - Y) > 1e-12*Y:
            raise DomainError(f'y mesh ends at {y_mesh.interval[1]}, not at Y={Y}')
        return y_mesh
    return default_y_mesh(4.0*diam if Y is None else Y)

def _inside(omega:TOmega, pts:np.ndarray)->np.ndarray:
    if isinstance(omega, Polygon):
        return omega.contains(pts)
    return (pts[:, 0] > omega[0]) & (pts[:, 0] < omega[1])

def _solve_sparse(A:sp.csr_matrix, r:np.ndarray, tol:float)->np.ndarray:
    if not np.any(r):
        return np.zeros_like(r)
    diag = A.diagonal()
    if np.any(diag <= 0):
        raise SolverError('extension matrix has a non-positive diagonal, the system is indefinite')
    if len(r) <= DIRECT_LIMIT:
        return spsolve(A.tocsc(), r)
    M = LinearOperator(A.shape, matvec=lambda v: v/diag)
    try:
        x, info = cg(A, r, rtol=tol, maxiter=20*len(r), M=M)
    except TypeError:
        # scipy < 1.12 names the relative tolerance `tol`
        x, info = cg(A, r, tol=tol, maxiter=20*len(r), M=M)
    if info != 0:
        raise SolverError(f'conjugate gradients did not converge (info={info})')
    return x

def _solve_constrained(disc:TensorDiscretization, rhs:np.ndarray, fixed:np.ndarray,
                       fixed_values:np.ndarray, tol:float)->Tuple[np.ndarray, float]:
    K = disc.stiffness()
    free = ~fixed.ravel()
    u = fixed_values.ravel().copy()
    u[free] = 0.0
    r = rhs.ravel()[free] - (K @ u)[free]
    A = K[free][:, free]
    with MeasureBlockTime('extension_linear_solve'):
        x = _solve_sparse(A, r, tol)
    rnorm = float(np.linalg.norm(r))
    residual = float(np.linalg.norm(A @ x - r))/rnorm if rnorm > 0 else 0.0
    u[free] = x
    energy = float(u @ (K @ u))
    if energy < -1e-12*max(1.0, float(np.abs(u).max())**2):
        raise SolverError(f'negative discrete energy {energy}, the system is indefinite')
    return u.reshape(disc.shape), residual

def _trace_load(disc:TensorDiscretization, f:ScalarField, omega:TOmega)->np.ndarray:
    pts, wx, bases = disc.x_quadrature(disc.degree + 6)
    vals = np.where(_inside(omega, pts), f.value(pts), 0.0)
    return disc.project_load(vals, wx, bases)

def _volume_load(disc:TensorDiscretization, F:ScalarField, H:float)->np.ndarray:
    pts, wx, bases = disc.x_quadrature()
    y, wy = disc.y_quadrature(0.0, upper=H)
    By = disc.y_space.basis_values(y)
    full = np.concatenate([np.repeat(pts, len(y), axis=0), np.tile(y, len(pts))[:, None]], axis=1)
    vals = F.value(full)
    return disc.project_load(vals, wx, bases, wy, By)

def solve_extension(f:Optional[ScalarField], F:Optional[ScalarField], params:FractionalParams,
                    trace_mesh:TTraceMesh, y_mesh:Optional[Mesh1D]=None, Y:Optional[float]=None,
                    omega:Optional[TOmega]=None, H:Optional[float]=None, degree:int=1,
                    tol:float=1e-10)->ExtensionField:
    """Minimizer of ½ b(U,U) - ∫ F U - ∫_Ω f tr U.

    `omega` is an interval whose ends are trace mesh nodes (d = 1) or a
    polygon (d = 2); it defaults to the whole box. Y defaults to 4·diam(Ω)
    and H, the height above which F is cut off, to Y/2."""
    meshes = _as_meshes(trace_mesh)
    if params.d != len(meshes):
        raise DomainError(f'params are for d={params.d} but the trace mesh has dimension {len(meshes)}')
    omega = _box_omega(meshes) if omega is None else omega
    if len(meshes) == 1:
        omega = (float(omega[0]), float(omega[1]))
        for end in omega:
            _node_index(meshes[0].nodes, end)
    ym = _resolve_y_mesh(y_mesh, Y, _omega_diameter(omega))
    Yv = ym.interval[1]
    H = 0.5*Yv if H is None else float(H)
    if H > Yv:
        raise SolverError(f'truncation height Y={Yv} is below the support height H={H}')

    disc = TensorDiscretization(meshes, ym, params.alpha, degree)
    with MeasureBlockTime('solve_extension'):
        rhs = np.zeros(disc.shape)
        if f is not None:
            if f.dim != disc.d:
                raise DomainError(f'trace data has dimension {f.dim}, expected {disc.d}')
            rhs[..., 0] += _trace_load(disc, f, omega)
        if F is not None:
            if F.dim != disc.d + 1:
                raise DomainError(f'volume data has dimension {F.dim}, expected {disc.d + 1}')
            rhs += _volume_load(disc, F, H)
        if not np.all(np.isfinite(rhs)):
            raise SolverError('load is not finite, the data is not integrable against the basis')

        fixed = np.zeros(disc.shape, dtype=bool)
        fixed[..., -1] = True
        fixed[disc.lateral_mask(), :] = True
        fixed[~disc.trace_mask(omega), 0] = True
        u, residual = _solve_constrained(disc, rhs, fixed, np.zeros(disc.shape), tol)

    U = ExtensionField(disc, u, params, omega, f, F, H, residual, rhs, ~fixed, 'solve')
    logger.info({'solve_extension': {'s': params.s, 'd': disc.d, 'Y': Yv, 'H': H,
                 'shape': list(disc.shape), 'unknowns': int((~fixed).sum()),
                 'residual': residual, 'energy': U.energy}}, exists_ok=True)
    return U

def extend_trace(u_trace:ScalarField, params:FractionalParams, trace_mesh:TTraceMesh,
                 y_mesh:Optional[Mesh1D]=None, Y:Optional[float]=None, degree:int=1,
                 tol:float=1e-10)->ExtensionField:
    """Minimizer of b(U, U) with tr U = u_trace (nodally interpolated) on the box,
    U = 0 on the lateral boundary above y = 0 and at y = Y."""
    meshes = _as_meshes(trace_mesh)
    if params.d != len(meshes) or u_trace.dim != len(meshes):
        raise DomainError('trace, params and trace mesh dimensions must agree')
    omega = _box_omega(meshes)
    ym = _resolve_y_mesh(y_mesh, Y, _omega_diameter(omega))
    disc = TensorDiscretization(meshes, ym, params.alpha, degree)
    with MeasureBlockTime('extend_trace'):
        fixed = np.zeros(disc.shape, dtype=bool)
        fixed[..., 0] = True
        fixed[..., -1] = True
        fixed[disc.lateral_mask(), :] = True
        values = np.zeros(disc.shape)
        values[..., 0] = u_trace.value(disc.trace_points()).reshape(disc.shape[:-1])
        u, residual = _solve_constrained(disc, np.zeros(disc.shape), fixed, values, tol)
    U = ExtensionField(disc, u, params, omega, residual=residual, load=np.zeros(disc.shape),
                       free=~fixed, provenance='extend')
    logger.info({'extend_trace': {'s': params.s, 'd': disc.d, 'Y': disc.Y,
                 'shape': list(disc.shape), 'energy': U.energy}}, exists_ok=True)
    return U

def _omega_distance(omega:TOmega, pts:np.ndarray)->np.ndarray:
    if isinstance(omega, Polygon):
        return np.where(omega.contains(pts), omega.boundary_distance(pts), 0.0)
    return np.clip(np.minimum(pts[:, 0] - omega[0], omega[1] - pts[:, 0]), 0.0, None)

def random_admissible_fields(U:ExtensionField, n:int=100, seed:int=0,
                             modes:int=3)->List[ExtensionField]:
    """n random smooth members of the admissible space on U's discretization.

    Each is a random combination of box sine modes times dist(x, ∂Ω) (zero off
    Ω) with profiles (1 - y/Y)^{l+1}, plus box sine modes times y(Y - y)
    profiles, so the same seed gives the same continuous fields on every mesh."""
    disc = U.disc
    pts = disc.trace_points()
    lo = np.array([s.mesh.interval[0] for s in disc.x_spaces])
    hi = np.array([s.mesh.interval[1] for s in disc.x_spaces])
    z = (pts - lo)/(hi - lo)
    dist = _omega_distance(U.omega, pts)
    y = disc.y_mesh.nodes/disc.Y
    js = list(product(range(1, modes + 1), repeat=disc.d))
    sines = [np.prod(np.sin(np.pi*np.array(j)[None, :]*z), axis=1) for j in js]
    trace_profiles = [(1.0 - y)**(l + 1) for l in range(modes)]
    bulk_profiles = [y*(1.0 - y)*y**l for l in range(modes)]

    fixed = np.zeros(disc.shape, dtype=bool)
    fixed[..., -1] = True
    fixed[disc.lateral_mask(), :] = True
    fixed[~U.trace_mask(), 0] = True

    rng = make_rng(seed)
    out = []
    for _ in range(n):
        C = np.zeros((len(pts), len(y)))
        for j, sx in zip(js, sines):
            scale = 1.0/float(np.sum(j))
            for l in range(modes):
                a, b = rng.standard_normal(2)*scale/(l + 1)
                C += a*np.outer(dist*sx, trace_profiles[l]) + b*np.outer(sx, bulk_profiles[l])
        C = C.reshape(disc.shape)
        C[fixed] = 0.0
        out.append(U.with_coeffs(C, 'random'))
    return out
