# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

import numpy as np
import pytest
from scipy.integrate import trapezoid

from fraclap.common.errors import DomainError
from fraclap.fields import ConstantField, GetoorField, scaled
from fraclap.fracops import FractionalParams, getoor_constant
from fraclap.solver1d import graded_mesh, uniform_mesh, default_grading, DiscreteSolution, \
    solve_dirichlet_1d, galerkin_defect, error_norms, convergence_study


def _getoor_problem(s:float):
    return ConstantField(getoor_constant(1, s)), GetoorField(s)

def test_graded_mesh_uniform():
    assert np.allclose(graded_mesh(4, 1.0).nodes, [0, 0.25, 0.5, 0.75, 1.0])

def test_graded_mesh_formula():
    nodes = graded_mesh(4, 2.0).nodes
    assert np.allclose(nodes, [0.0, 2*(1/4)**2, 0.5, 7/8, 1.0])

@pytest.mark.parametrize('n,beta', [(4, 2.0), (8, 3.0), (9, 1.5)])
def test_graded_mesh_left_half_follows_power_law(n, beta):
    nodes = graded_mesh(n, beta).nodes
    k = np.arange(n//2 + 1)
    assert np.allclose(nodes[:n//2 + 1], 2.0**(beta - 1.0)*(k/n)**beta)

def test_graded_mesh_symmetric():
    for n in (5, 8, 13):
        m = graded_mesh(n, 3.0, (-1.0, 2.0))
        assert np.allclose(m.nodes - (-1.0), 2.0 - m.nodes[::-1], atol=1e-14)
        assert m.h[0] < m.h[n//2]

def test_graded_mesh_rejects():
    with pytest.raises(DomainError):
        graded_mesh(4, 0.5)
    with pytest.raises(DomainError):
        graded_mesh(1, 2.0)
    assert default_grading(0.5) == 2.0 and default_grading(0.7) == 3.0

def test_zero_data():
    params = FractionalParams(0.4)
    sol = solve_dirichlet_1d(ConstantField(0.0), params, uniform_mesh(8, (-1, 1)), 2)
    assert np.all(sol.coeffs == 0.0)
    assert sol.energy == 0.0

def test_boundary_values_and_residual():
    f, _ = _getoor_problem(0.5)
    sol = solve_dirichlet_1d(f, FractionalParams(0.5), uniform_mesh(16, (-1, 1)), 2)
    assert sol.coeffs[0] == 0.0 and sol.coeffs[-1] == 0.0
    assert np.all(sol.value(np.array([-1.5, -1.0, 1.0, 3.0])) == 0.0)
    assert sol.residual < 1e-10
    assert galerkin_defect(sol) < 1e-9
    assert sol.provenance == 'direct'
    assert sol.p_max == 2

def test_getoor_half_uniform_rate():
    params = FractionalParams(0.5)
    f = ConstantField(1.0)
    u = GetoorField(0.5)
    errs = []
    for n in (16, 32, 64, 128):
        sol = solve_dirichlet_1d(f, params, uniform_mesh(n, (-1, 1)), 1)
        errs.append(error_norms(sol, u)['L2'])
    assert all(a > b for a, b in zip(errs, errs[1:]))
    rate = -np.polyfit(np.log([16, 32, 64, 128]), np.log(errs), 1)[0]
    assert rate >= 0.4

def test_graded_beats_uniform():
    params = FractionalParams(0.5)
    f, u = _getoor_problem(0.5)
    n_list = [16, 32, 64, 128]
    uniform = convergence_study(params, f, u, n_list, 1, beta=1.0)
    graded = convergence_study(params, f, u, n_list, 1, beta=2.0)
    assert uniform['rates']['L2'] >= 0.8
    assert graded['rates']['L2'] > uniform['rates']['L2']
    assert len(graded['rows']) == 4 and graded['beta'] == 2.0

def test_getoor_quarter_graded_p2():
    s = 0.25
    f, u = _getoor_problem(s)
    sol = solve_dirichlet_1d(f, FractionalParams(s), graded_mesh(512, 2.0, (-1, 1)), 2)
    assert error_norms(sol, u)['L2'] < 1e-3

def test_energy_monotone_under_refinement():
    params = FractionalParams(0.6)
    f, _ = _getoor_problem(0.6)
    mesh = uniform_mesh(4, (-1, 1))
    energies = []
    for _ in range(4):
        energies.append(solve_dirichlet_1d(f, params, mesh, 1).energy)
        mesh = mesh.refine()
    assert all(b >= a - 1e-12 for a, b in zip(energies, energies[1:]))

def test_boundary_singularity_exponent():
    s = 0.5
    n = 512
    mesh = uniform_mesh(n, (-1, 1))
    sol = solve_dirichlet_1d(ConstantField(1.0), FractionalParams(s), mesh, 1)
    h = mesh.h_max
    dist = mesh.nodes + 1.0
    sel = (dist >= h*(1 - 1e-9)) & (dist <= 10*h*(1 + 1e-9))
    slope = np.polyfit(np.log(dist[sel]), np.log(np.abs(sol.value(mesh.nodes[sel]))), 1)[0]
    assert abs(slope - s) < 0.1

def test_error_norms_self_zero():
    f, _ = _getoor_problem(0.3)
    sol = solve_dirichlet_1d(f, FractionalParams(0.3), uniform_mesh(10, (-1, 1)), 2)
    errs = error_norms(sol, sol)
    assert errs == {'L2': 0.0, 'energy': 0.0, 'linf_interior': 0.0}

def test_error_norms_trapezoid_oracle():
    params = FractionalParams(0.5)
    u = GetoorField(0.5)
    sol = solve_dirichlet_1d(ConstantField(1.0), params, uniform_mesh(32, (-1, 1)), 1)
    x = np.linspace(-1, 1, 2_000_001)
    oracle = np.sqrt(trapezoid((sol.value(x) - u.value(x))**2, x))
    got = error_norms(sol, u)['L2']
    assert abs(got - oracle) < 0.005*oracle

def test_error_norms_energy_galerkin():
    # energy error through Galerkin orthogonality matches a fine reference solution
    s = 0.5
    params = FractionalParams(s)
    f, u = _getoor_problem(s)
    sol = solve_dirichlet_1d(f, params, uniform_mesh(16, (-1, 1)), 1)
    e = error_norms(sol, u)['energy']
    assert e > 0
    finer = solve_dirichlet_1d(f, params, uniform_mesh(64, (-1, 1)), 1)
    assert error_norms(finer, u)['energy'] < e

def test_error_norms_triangle_inequality():
    params = FractionalParams(0.45)
    mesh = uniform_mesh(12, (-1, 1))
    base = solve_dirichlet_1d(scaled(ConstantField(1.0), 2.0), params, mesh, 2)
    rng = np.random.default_rng(3)
    for _ in range(5):
        sols = []
        for _ in range(3):
            c = np.zeros_like(base.coeffs)
            c[1:-1] = rng.standard_normal(len(c) - 2)
            sols.append(DiscreteSolution(mesh, 2, c, params, matrix=base.matrix, load=base.load))
        u, v, w = sols
        uw, uv, vw = error_norms(u, w), error_norms(u, v), error_norms(v, w)
        for key in ('L2', 'energy', 'linf_interior'):
            assert uw[key] <= uv[key] + vw[key] + 1e-12

def test_discrete_solution_validation():
    params = FractionalParams(0.5)
    mesh = uniform_mesh(4)
    with pytest.raises(DomainError):
        DiscreteSolution(mesh, 1, np.zeros(3), params)
    with pytest.raises(DomainError):
        DiscreteSolution(mesh, 1, np.zeros(5), params, provenance='guess')
    sol = DiscreteSolution(mesh, 1, np.zeros(5), params, provenance='analytic')
    x, y = sol.sample(11)
    assert len(x) == 11 and np.all(y == 0)
