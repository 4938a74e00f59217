# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

from typing import Dict, List, Optional, Sequence

import numpy as np

from ..common.common import logger
from ..common.errors import DomainError
from ..common.utils import loglog_slope
from ..fields.scalar_field import ScalarField
from ..fracops.params import FractionalParams
from ..fracops.quadrature import gauss_legendre
from .mesh import default_grading, graded_mesh
from .solver import DiscreteSolution, solve_dirichlet_1d


def _l2_diff(u_h:DiscreteSolution, u_ref:ScalarField, n_quad:int)->float:
    rule = gauss_legendre(n_quad)
    nodes, h = u_h.mesh.nodes, u_h.mesh.h
    x = (nodes[:-1, None] + np.outer(h, rule.nodes)).ravel()
    w = (h[:, None]*rule.weights[None, :]).ravel()
    diff = u_h.value(x) - u_ref.value(x)
    return float(np.sqrt(np.sum(w*diff**2)))

def _same_space(u:DiscreteSolution, v:ScalarField)->bool:
    return isinstance(v, DiscreteSolution) and v.degree == u.degree \
        and np.array_equal(v.mesh.nodes, u.mesh.nodes)

def _energy_diff(u_h:DiscreteSolution, u_ref:ScalarField, n_quad:int)->float:
    """a(u - u_h, u - u_h)^{1/2}. Exact in the matrix norm when u_ref lives in
    the same space; otherwise u_ref must solve the problem with u_h's data and
    Galerkin orthogonality gives a(u,u) - a(u_h,u_h) = ⟨f, u⟩ - ⟨f, u_h⟩."""
    if u_h.matrix is None:
        return float('nan')
    if _same_space(u_h, u_ref):
        d = u_h.free_coeffs - u_ref.free_coeffs
        return float(np.sqrt(max(float(d @ u_h.matrix @ d), 0.0)))
    if u_h.data is None:
        return float('nan')
    rule = gauss_legendre(n_quad)
    nodes, h = u_h.mesh.nodes, u_h.mesh.h
    x = (nodes[:-1, None] + np.outer(h, rule.nodes)).ravel()
    w = (h[:, None]*rule.weights[None, :]).ravel()
    f_u = float(np.sum(w * u_h.data.value(x) * u_ref.value(x)))
    f_uh = float(u_h.free_coeffs @ u_h.load)
    # quadrature noise can push the difference slightly negative
    return float(np.sqrt(max(f_u - f_uh, 0.0)))

def error_norms(u_h:DiscreteSolution, u_ref:ScalarField, interior_fraction:float=0.1,
                n_quad:Optional[int]=None, n_sample:int=2001)->Dict[str, float]:
    """L², energy and interior max-norm distances between u_h and u_ref.

    The max is taken over points at distance ≥ interior_fraction·|Ω| from ∂Ω."""
    if u_ref.dim != 1:
        raise DomainError('reference field must be one dimensional')
    if not 0.0 <= interior_fraction < 0.5:
        raise DomainError(f'interior_fraction={interior_fraction} must lie in [0, 1/2)')
    nq = n_quad or 2*u_h.degree + 8
    a, b = u_h.mesh.interval
    margin = interior_fraction*(b - a)
    x = np.union1d(np.linspace(a + margin, b - margin, n_sample),
                   u_h.mesh.nodes[(u_h.mesh.nodes >= a + margin) & (u_h.mesh.nodes <= b - margin)])
    linf = float(np.max(np.abs(u_h.value(x) - u_ref.value(x))))
    return {'L2': _l2_diff(u_h, u_ref, nq),
            'energy': _energy_diff(u_h, u_ref, nq),
            'linf_interior': linf}

def convergence_study(params:FractionalParams, f:ScalarField, u_ref:ScalarField,
                      n_list:Sequence[int], degree:int=1, beta:Optional[float]=None,
                      interval=(-1.0, 1.0))->Dict:
    """Solve on graded meshes with n in n_list elements and fit the decay rate
    of each error against n (rate r means error ∝ n^{-r})."""
    if len(n_list) < 2:
        raise DomainError('a convergence study needs at least two meshes')
    beta = default_grading(params.s) if beta is None else beta
    rows:List[Dict] = []
    for n in n_list:
        mesh = graded_mesh(int(n), beta, interval)
        u_h = solve_dirichlet_1d(f, params, mesh, degree)
        errs = error_norms(u_h, u_ref)
        rows.append({'n': int(n), 'h': mesh.h_max, 'unknowns': len(u_h.free_coeffs),
                     'energy_value': u_h.energy, **errs})
    ns = [r['n'] for r in rows]
    rates = {}
    for key in ('L2', 'energy', 'linf_interior'):
        errs = [r[key] for r in rows]
        ok = all(np.isfinite(e) and e > 0 for e in errs)
        rates[key] = -loglog_slope(ns, errs) if ok else float('nan')
    logger.info({'convergence_study': {'s': params.s, 'beta': beta, 'degree': degree,
                 'n': ns, 'rates': rates}}, exists_ok=True)
    return {'rows': rows, 'rates': rates, 'beta': beta, 'degree': degree}
