# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

from functools import lru_cache

import numpy as np
import pytest
from scipy.integrate import trapezoid

from fraclap.common.artifacts import ArtifactHeader, read_body, read_header
from fraclap.common.errors import DomainError, SolverError
from fraclap.common.utils import loglog_slope
from fraclap.fields import BesselExtensionField, ConstantField, ExpField, PolynomialField, SineField
from fraclap.fracops import FractionalParams
from fraclap.fracops.fem1d import Mesh1D
from fraclap.geometry import l_shape
from fraclap.solver1d import graded_mesh, solve_dirichlet_1d, uniform_mesh
from fraclap.extension import y_mesh, weighted_matrices, weighted_rule, weighted_moment, \
    TensorDiscretization, trace_mesh_1d, box_grid, solve_extension, extend_trace, \
    random_admissible_fields, dtn_from_levels, dtn_trace, n_check, poincare_check, \
    trace_inequality_check, multiplicative_trace_check, shift_theorem_probe, shift_probe_grid


@lru_cache(maxsize=None)
def _sine_extension(k:int, s:float=0.5):
    """sin(kx) on (0, 2π) extended into (0, 2π) × (0, 4)."""
    return extend_trace(SineField(k), FractionalParams(s), uniform_mesh(128, (0.0, 2*np.pi)),
                        y_mesh=y_mesh(4.0, first=1e-3, max_cell=0.05))

@lru_cache(maxsize=None)
def _small_problem(s:float, refine:bool=False):
    """f = 1 on (-1, 1) on a uniform box mesh of (-1.5, 1.5) × (0, 2)."""
    tm = trace_mesh_1d(uniform_mesh(16, (-1.0, 1.0)), 0.5, growth=1.0)
    ym = y_mesh(2.0, first=0.01, max_cell=0.1)
    if refine:
        tm, ym = tm.refine(), ym.refine()
    return solve_extension(ConstantField(1.0), None, FractionalParams(s), tm, y_mesh=ym,
                           omega=(-1.0, 1.0))

@lru_cache(maxsize=None)
def _getoor_extension():
    omega_mesh = graded_mesh(32, 2.0, (-1.0, 1.0))
    tm = trace_mesh_1d(omega_mesh, 8.0)
    U = solve_extension(ConstantField(1.0), None, FractionalParams(0.5), tm, omega=(-1.0, 1.0))
    return U, omega_mesh


def test_y_mesh_shape():
    m = y_mesh(2.0)
    assert m.nodes[0] == 0.0 and m.nodes[-1] == 2.0
    assert np.isclose(m.nodes[1], 2e-3)
    assert m.h_max <= 2.0/64*(1 + 1e-9)
    assert np.all(np.diff(m.nodes) > 0)
    with pytest.raises(DomainError):
        y_mesh(-1.0)
    with pytest.raises(DomainError):
        y_mesh(1.0, ratio=1.5)

@pytest.mark.parametrize('s', [0.2, 0.5, 0.8])
def test_weighted_moments(s):
    alpha = 1 - 2*s
    Y = 3.0
    m = y_mesh(Y)
    M, K = weighted_matrices(m, alpha)
    ones = np.ones(M.shape[0])
    assert np.isclose(ones @ M @ ones, weighted_moment(Y, alpha), rtol=1e-10)
    assert np.allclose(K @ ones, 0.0, atol=1e-10)
    y, w = weighted_rule(m, -alpha, upper=1.0)
    assert np.isclose(np.sum(w*y), weighted_moment(1.0, -alpha, 1), rtol=1e-10)
    assert y.max() <= 1.0

def test_trace_mesh_keeps_omega():
    omega = uniform_mesh(8, (-1.0, 1.0))
    tm = trace_mesh_1d(omega, 3.0)
    assert np.isclose(tm.nodes[0], -4.0) and np.isclose(tm.nodes[-1], 4.0)
    assert set(np.round(omega.nodes, 12)) <= set(np.round(tm.nodes, 12))
    i = int(np.argmin(np.abs(tm.nodes + 1.0)))
    assert np.isclose(tm.nodes[i] - tm.nodes[i-1], 1.25*0.25)
    with pytest.raises(DomainError):
        trace_mesh_1d(omega, 0.0)

def test_tensor_discretization_basics():
    disc = TensorDiscretization([uniform_mesh(6, (0.0, 3.0))], y_mesh(1.0, max_cell=0.25), 0.0)
    K = disc.stiffness()
    assert abs(K - K.T).max() < 1e-12
    assert disc.shape == (7, len(disc.y_mesh.nodes))
    pts, wx, _ = disc.x_quadrature()
    assert np.isclose(wx.sum(), 3.0)
    assert disc.trace_mask((1.0, 2.0)).sum() == 1
    assert disc.lateral_mask().sum() == 2

def test_zero_data_zero_field():
    U = solve_extension(ConstantField(0.0), None, FractionalParams(0.3),
                        uniform_mesh(8, (-1.0, 1.0)), Y=1.0)
    assert np.all(U.coeffs == 0.0) and U.energy == 0.0
    assert np.all(dtn_trace(U).values == 0.0)

def test_extension_rejects():
    mesh = uniform_mesh(8, (-1.0, 1.0))
    with pytest.raises(SolverError):
        solve_extension(ConstantField(1.0), None, FractionalParams(0.5), mesh, Y=1.0, H=2.0)
    with pytest.raises(DomainError):
        solve_extension(ConstantField(1.0), None, FractionalParams(0.5, 2), mesh, Y=1.0)
    with pytest.raises(DomainError):
        solve_extension(ConstantField(1.0), None, FractionalParams(0.5), mesh, Y=1.0,
                        omega=(-0.3, 0.3))

def test_trace_constraint_and_defect():
    U = _small_problem(0.3)
    mask = U.trace_mask()
    assert np.all(U.level(0)[~mask] == 0.0)
    assert np.all(U.coeffs[..., -1] == 0.0)
    assert np.all(U.coeffs[[0, -1], :] == 0.0)
    assert U.energy > 0.0
    assert U.euler_lagrange_defect() < 1e-8
    assert U.residual < 1e-8

def test_sine_energy_linear_in_k():
    ks = [1, 2, 4, 8]
    energies = [_sine_extension(k).energy for k in ks]
    for k, E in zip(ks, energies):
        assert abs(E/(np.pi*k/np.tanh(4.0*k)) - 1.0) < 0.06
    assert abs(loglog_slope(ks, energies) - 1.0) < 0.1

def test_trace_matches_direct_solver():
    U, omega_mesh = _getoor_extension()
    tr = U.trace()
    direct = solve_dirichlet_1d(ConstantField(1.0), FractionalParams(0.5), omega_mesh, 1)
    x = np.linspace(-1.0, 1.0, 801)
    diff = trapezoid((tr.value(x) - direct.value(x))**2, x)
    assert np.sqrt(diff/trapezoid(direct.value(x)**2, x)) <= 0.05

def test_dtn_of_solution_recovers_data():
    U, _ = _getoor_extension()
    g = dtn_trace(U)
    x = g.axes[0]
    assert x.min() > -1.0 and x.max() < 1.0
    err = trapezoid((g.values - 1.0)**2, x)/trapezoid(np.ones_like(x), x)
    assert np.sqrt(err) <= 0.1

@pytest.mark.parametrize('s', [0.3, 0.5])
def test_dtn_of_sine_extension(s):
    k = 2
    U = _sine_extension(k, s)
    g = dtn_trace(U)
    x = g.axes[0]
    assert np.allclose(g.values, k**(2*s)*np.sin(k*x), atol=0.03*k**(2*s))

def test_dtn_levels_at_half():
    U = _sine_extension(2)
    g = dtn_trace(U, method='levels')
    assert np.allclose(g.values, 2*np.sin(2*g.axes[0]), atol=0.06)
    with pytest.raises(DomainError):
        dtn_trace(U, method='normal')

def test_dtn_levels_of_solution_recovers_data():
    U, _ = _getoor_extension()
    g = dtn_trace(U, method='levels')
    x = g.axes[0]
    err = trapezoid((g.values - 1.0)**2, x)/trapezoid(np.ones_like(x), x)
    assert np.sqrt(err) <= 0.1

def test_dtn_levels_of_sine_extension_off_half():
    k, s = 2, 0.3
    U = _sine_extension(k, s)
    g = dtn_trace(U, method='levels')
    x = g.axes[0]
    exact = k**(2*s)*np.sin(k*x)
    err = trapezoid((g.values - exact)**2, x)/trapezoid(exact**2, x)
    assert np.sqrt(err) <= 0.1

def test_galerkin_levels_reduce_to_pointwise_at_half():
    rng = np.random.default_rng(3)
    values = rng.standard_normal((5, 3))
    y = [0.0, 0.01, 0.03]
    params = FractionalParams(0.5)
    assert np.allclose(dtn_from_levels(values, y, params, galerkin=True),
                       dtn_from_levels(values, y, params))

@pytest.mark.parametrize('s,k', [(0.5, 1.0), (0.5, 3.0), (0.3, 2.0), (0.75, 1.0)])
def test_dtn_of_analytic_extension(s, k):
    V = BesselExtensionField(s, [k])
    x = np.linspace(0.0, 2*np.pi, 33)
    g = dtn_trace(V, FractionalParams(s), x, y_levels=(0.0, 1e-4, 2e-4))
    assert np.allclose(g.values, k**(2*s)*np.sin(k*x), atol=1e-3*k**(2*s))

def test_dtn_needs_three_levels():
    with pytest.raises(DomainError):
        dtn_from_levels(np.ones((4, 2)), [0.0, 1.0], FractionalParams(0.5))
    with pytest.raises(DomainError):
        dtn_from_levels(np.ones((4, 3)), [0.1, 1.0, 2.0], FractionalParams(0.5))

def test_random_fields_admissible_and_seeded():
    U = _small_problem(0.3)
    fields = random_admissible_fields(U, n=5, seed=3)
    again = random_admissible_fields(U, n=5, seed=3)
    mask = U.trace_mask()
    for V, W in zip(fields, again):
        assert np.array_equal(V.coeffs, W.coeffs)
        assert np.all(V.level(0)[~mask] == 0.0)
        assert np.all(V.coeffs[..., -1] == 0.0)
        assert np.all(V.coeffs[[0, -1], :] == 0.0)
        assert V.energy > 0.0

def test_poincare_monotone_in_height():
    U = _small_problem(0.5)
    ratios = [poincare_check(U, h) for h in (0.25, 0.5, 1.0, 2.0, 5.0)]
    assert all(b >= a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] == ratios[-2]
    with pytest.raises(DomainError):
        poincare_check(U, 0.0)

def test_poincare_rejects_zero_field():
    U = _small_problem(0.5)
    with pytest.raises(SolverError):
        poincare_check(U.with_coeffs(np.zeros(U.disc.shape)), 1.0)

@pytest.mark.parametrize('s', [0.3, 0.5])
def test_poincare_ensemble_stable_under_refinement(s):
    worst = []
    for refine in (False, True):
        U = _small_problem(s, refine)
        worst.append(max(poincare_check(V, 1.0) for V in random_admissible_fields(U, n=100, seed=0)))
    assert np.all(np.isfinite(worst))
    assert abs(worst[1]/worst[0] - 1.0) <= 0.05

def test_trace_inequality_sine_pair():
    for k in (1, 2, 4):
        r = trace_inequality_check(_sine_extension(k))
        assert 0.5 < r <= 1.01

def test_trace_inequality_zero_trace():
    U = extend_trace(ConstantField(0.0), FractionalParams(0.4), uniform_mesh(8, (0.0, 1.0)), Y=1.0)
    assert trace_inequality_check(U) == 0.0

def test_trace_inequality_ensemble_stable():
    worst = []
    for refine in (False, True):
        U = _small_problem(0.4, refine)
        worst.append(max(trace_inequality_check(V) for V in random_admissible_fields(U, n=100, seed=1)))
    assert abs(worst[1]/worst[0] - 1.0) <= 0.1

def test_multiplicative_trace_closed_form():
    H = 2.0
    a = (1.0 - np.exp(-H/2))/2
    r = multiplicative_trace_check(ExpField(-1.0), H=H, alpha=0.0)
    assert np.isclose(r, 1.0/(2*a), rtol=1e-10)
    assert multiplicative_trace_check(PolynomialField([0.0, 1.0]), H=H, alpha=0.3) == 0.0
    with pytest.raises(DomainError):
        multiplicative_trace_check(ExpField(-1.0), H=H)

def test_multiplicative_trace_of_extension():
    k = 2
    U = _sine_extension(k)
    r = multiplicative_trace_check(U)
    exact = multiplicative_trace_check(ExpField(-float(k)), H=U.H, alpha=0.0)
    assert abs(r/exact - 1.0) < 0.05

def test_n_check_apriori_ratio():
    U, _ = _getoor_extension()
    report = n_check(U)
    assert report.F_norm == 0.0
    assert report.f_dual_norm > 0.0
    assert abs(report.apriori_ratio - 1.0) < 0.1
    assert report.N2 >= report.energy
    assert set(report.as_dict()) >= {'energy', 'N2', 'apriori_ratio'}

def test_shift_probe():
    U = _small_problem(0.5)
    grid = shift_probe_grid(U)
    rows = grid['rows']
    assert [r['t'] for r in rows] == [0.0, 0.2, 0.4, 0.45]
    assert grid['finite']
    assert rows[0]['ratio'] <= 1.0 + 1e-9
    assert np.isclose(rows[0]['lhs'], U.energy, rtol=1e-9)
    assert rows[1]['ratio'] >= rows[0]['ratio']
    with pytest.raises(DomainError):
        shift_theorem_probe(U, 0.5)

def test_truncation_with_zero_mean_data():
    base = y_mesh(2.0, first=2e-3, max_cell=0.125)
    long = np.append(base.nodes, np.linspace(2.0, 16.0, 113)[1:])
    tm = trace_mesh_1d(uniform_mesh(16, (-1.0, 1.0)), 3.0)
    f = PolynomialField([0.0, 1.0])
    traces = {}
    for Y in (2.0, 4.0, 8.0, 16.0):
        ym = Mesh1D(long[long <= Y + 1e-12])
        U = solve_extension(f, None, FractionalParams(0.5), tm, y_mesh=ym, omega=(-1.0, 1.0))
        traces[Y] = U.level(0)
    ref = traces[16.0]
    gaps = [np.abs(traces[Y] - ref).max()/np.abs(ref).max() for Y in (2.0, 4.0, 8.0)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-3

def test_lshape_extension():
    x_meshes = box_grid(l_shape(), 8, 0.5)
    U = solve_extension(ConstantField(1.0, dim=2), None, FractionalParams(0.5, 2), x_meshes,
                        y_mesh=y_mesh(2.0, first=2e-3, max_cell=0.125), omega=l_shape())
    mask = U.trace_mask()
    assert mask.sum() == 33
    assert np.all(U.level(0)[~mask] == 0.0)
    assert U.energy > 0.0
    g = dtn_trace(U)
    assert g.values.shape == mask.shape
    assert np.all(g.values[~mask] == 0.0)
    assert np.allclose(g.values[mask], 1.0, atol=1e-8)

def test_slice_export(tmp_path):
    U = _small_problem(0.5)
    path = str(tmp_path/'slices.csv')
    U.write_slices_csv(path, ArtifactHeader('0123456789abcdef', 7), levels=[0, 1])
    body = read_body(path)
    assert body[0] == 'x,y,U'
    assert len(body) == 1 + 2*U.disc.shape[0]
    assert read_header(path)['seed'] == '7'
