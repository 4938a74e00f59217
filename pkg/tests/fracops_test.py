# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

import math

import numpy as np
import pytest
from scipy.integrate import quad, trapezoid
from scipy.special import gamma

from fraclap.common.errors import DomainError
from fraclap.fields import ConstantField, GetoorField, PolynomialField, RestrictedField, \
    CombinationField
from fraclap.fracops import FractionalParams, kernel_constant, dtn_constant, getoor_constant, \
    gauss_jacobi, pv_apply, assemble_bilinear_1d, assemble_full, Mesh1D, FESpace1D, \
    BrokenSpace1D, seminorm_matrix, quadratic_norm, sobolev_norm, dual_norm, \
    coercivity_constant, set_cache_dir
from fraclap.solver1d import uniform_mesh


def test_kernel_constant_half():
    assert abs(kernel_constant(1, 0.5) - 1.0/math.pi) < 1e-12

def test_kernel_constant_positive_and_vanishing():
    probe = [10.0**-k for k in range(1, 8)]
    vals = [kernel_constant(1, s) for s in probe]
    assert all(v > 0 for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-6
    for d in (1, 2):
        for s in np.linspace(0.05, 0.95, 19):
            assert kernel_constant(d, s) > 0

def test_kernel_constant_closed_form():
    for d in (1, 2):
        for s in (0.2, 0.5, 0.8):
            expected = -2**(2*s)*gamma(s + d/2)/(math.pi**(d/2)*gamma(-s))
            assert abs(kernel_constant(d, s) - expected) < 1e-12*expected

def test_constants_reject_bad_order():
    for s in (0.0, 1.0, -0.2, 1.5, float('nan')):
        with pytest.raises(DomainError):
            kernel_constant(1, s)
        with pytest.raises(DomainError):
            dtn_constant(s)
    with pytest.raises(DomainError):
        kernel_constant(3, 0.5)

def test_dtn_constant():
    assert abs(dtn_constant(0.5) - 1.0) < 1e-12
    assert abs(dtn_constant(0.75) - math.sqrt(2)*gamma(0.75)/gamma(0.25)) < 1e-12
    assert abs(dtn_constant(0.25) - gamma(0.25)/(math.sqrt(2)*gamma(0.75))) < 1e-12
    for s in np.arange(0.1, 0.95, 0.1):
        assert abs(dtn_constant(s)*dtn_constant(1 - s) - 1.0) < 1e-12

def test_params_derived():
    p = FractionalParams(0.3, 2)
    assert p.alpha == 1 - 2*0.3
    assert -1 < p.alpha < 1
    assert p.C_ds > 0 and p.d_s > 0
    assert p.with_dim(1).d == 1
    with pytest.raises(DomainError):
        FractionalParams(1.0)

def test_gauss_jacobi_moments():
    for alpha in (-0.5, 0.0, 0.5):
        rule = gauss_jacobi(alpha, 6)
        assert abs(rule.integrate(np.ones_like) - 1.0/(1 + alpha)) < 1e-14
        # exact up to degree 2n-1 against the weight
        for k in range(2*6):
            got = rule.integrate(lambda y: y**k)
            assert abs(got - 1.0/(alpha + k + 1)) < 1e-13

def test_gauss_jacobi_right_side_and_interval():
    rule = gauss_jacobi(0.3, 5, (1.0, 3.0), side='right')
    # ∫_1^3 (3-x)^0.3 x dx
    expected = quad(lambda x: (3 - x)**0.3*x, 1, 3, epsabs=1e-14)[0]
    assert abs(rule.integrate(lambda x: x) - expected) < 1e-12

def test_gauss_jacobi_positive_weights():
    for n in (1, 8, 32, 64):
        for alpha in (-0.9, -0.5, 0.0, 0.7):
            assert np.all(gauss_jacobi(alpha, n).weights > 0)

def test_gauss_jacobi_disk_cache(tmp_path):
    set_cache_dir(str(tmp_path))
    try:
        first = gauss_jacobi(0.123, 7)
        cached = list(tmp_path.glob('gj_*.npz'))
        assert len(cached) == 1
        again = gauss_jacobi(0.123, 7, (2.0, 4.0))
        assert np.allclose((again.nodes - 2.0)/2.0, first.nodes, rtol=0, atol=1e-15)
    finally:
        set_cache_dir(None)

def test_gauss_jacobi_rejects_bad_exponent():
    with pytest.raises(DomainError):
        gauss_jacobi(-1.0, 4)

def test_pv_getoor():
    for s in (0.25, 0.5, 0.75):
        params = FractionalParams(s)
        u = GetoorField(s)
        expected = getoor_constant(1, s)
        for x in (-0.6, -0.2, 0.0, 0.3, 0.5):
            assert abs(pv_apply(u, x, params, tol=1e-8) - expected) < 1e-6
    assert abs(getoor_constant(1, 0.5) - 1.0) < 1e-12

def test_pv_getoor_trapezoid_oracle():
    # brute force: C ∫_0^∞ (2u(0) - u(t) - u(-t)) t^{-1-2s} dt with t = w² to tame t^{-2s}
    s = 0.5
    params = FractionalParams(s)
    u = GetoorField(s)
    w = np.linspace(0.0, 1.0, 400001)[1:]
    t = w**2
    g = 2*(1 - np.sqrt(np.clip(1 - t**2, 0.0, None))) * t**(-1 - 2*s) * 2*w
    inner = trapezoid(g, w)
    oracle = params.C_ds*(inner + 2.0/(2*s))
    assert abs(pv_apply(u, 0.0, params) - oracle) < 1e-4

def test_pv_constant_without_support():
    params = FractionalParams(0.4)
    assert abs(pv_apply(ConstantField(3.0), 0.2, params)) < 1e-12

def test_pv_linear():
    params = FractionalParams(0.35)
    u = GetoorField(0.35)
    v = RestrictedField(PolynomialField([1.0, 0.0, -1.0]), [-1.0], [1.0])
    w = CombinationField([u, v], [2.0, -0.5])
    for x in (0.0, 0.4):
        lhs = pv_apply(w, x, params)
        rhs = 2.0*pv_apply(u, x, params) - 0.5*pv_apply(v, x, params)
        assert abs(lhs - rhs) < 1e-7

def _hat_energy_fourier(s:float)->float:
    # a(φ, φ) = (1/π) ∫_0^∞ ξ^{2s} (sin(ξ/2)/(ξ/2))^4 dξ for the hat on [-1, 1]
    g = lambda xi: xi**(2*s)*(np.sin(xi/2)/(xi/2))**4
    total, x0 = 0.0, 0.0
    for k in range(1, 320):
        x1 = 2*np.pi*k
        total += quad(g, x0, x1, epsabs=1e-15, epsrel=1e-13, limit=200)[0]
        x0 = x1
    tail = 6.0*x0**(2*s - 3)/(3 - 2*s)
    return (total + tail)/np.pi

def test_bilinear_two_elements():
    mesh = uniform_mesh(2, (-1.0, 1.0))
    A = assemble_bilinear_1d(mesh, 1, FractionalParams(0.5))
    assert A.shape == (1, 1)
    assert abs(A[0, 0] - 4*math.log(2)/math.pi) < 1e-8
    A = assemble_bilinear_1d(mesh, 1, FractionalParams(0.25))
    oracle = _hat_energy_fourier(0.25)
    assert abs(A[0, 0] - oracle) < 1e-6*oracle

def test_bilinear_symmetric_positive():
    for degree in (1, 2, 3):
        mesh = uniform_mesh(12, (0.0, 1.0))
        A = assemble_bilinear_1d(mesh, degree, FractionalParams(0.6))
        assert np.max(np.abs(A - A.T)) < 1e-14*np.max(np.abs(A))
        assert np.linalg.eigvalsh(A)[0] > 0

def test_bilinear_coercive_fine_mesh():
    mesh = uniform_mesh(256, (-1.0, 1.0))
    params = FractionalParams(0.3)
    A = assemble_bilinear_1d(mesh, 1, params)
    M = FESpace1D(mesh, 1).mass_matrix().toarray()[1:-1, 1:-1]
    assert coercivity_constant(A, M) > 0

def test_bilinear_far_decay():
    for s in (0.3, 0.7):
        mesh = uniform_mesh(64, (-1.0, 1.0))
        A = assemble_bilinear_1d(mesh, 1, FractionalParams(s))
        i = 20
        k = np.arange(4, 24)
        vals = np.abs(A[i, i + k])
        assert np.all(A[i, i + k] < 0)
        assert np.all(np.diff(vals) < 0)
        slope = np.polyfit(np.log(k), np.log(vals), 1)[0]
        assert abs(slope + 1 + 2*s) < 0.2

def test_bilinear_matches_exterior_seminorm():
    # for t < 1/2 the zero-extension seminorm is 2/C times the energy
    t = 0.3
    mesh = Mesh1D(np.array([0.0, 0.1, 0.35, 0.5, 0.8, 1.0]))
    space = FESpace1D(mesh, 2)
    A = assemble_full(space, FractionalParams(t))
    rng = np.random.default_rng(7)
    c = space.expand(rng.standard_normal(len(space.free_dofs)))
    broken = BrokenSpace1D(mesh, 2)
    S = seminorm_matrix(broken, t, exterior=True)
    cb = broken.from_continuous(space, c)
    lhs = quadratic_norm(S, cb)**2
    rhs = 2.0/kernel_constant(1, t)*float(c @ A @ c)
    assert abs(lhs - rhs) < 1e-6*rhs

def test_intrinsic_seminorm_linear():
    # ∬_{[0,1]²} |x - z|^{1-2t} = 2/((2-2t)(3-2t)) for u(x) = x
    mesh = uniform_mesh(5, (0.0, 1.0))
    space = BrokenSpace1D(mesh, 1)
    c = space.interpolate(lambda x, e: x)
    for t in (0.3, 0.7):
        got = quadratic_norm(seminorm_matrix(space, t), c)**2
        assert abs(got - 2.0/((2 - 2*t)*(3 - 2*t))) < 1e-8

def test_sobolev_norm_l2_part():
    mesh = uniform_mesh(4, (0.0, 1.0))
    space = BrokenSpace1D(mesh, 2)
    c = space.interpolate(lambda x, e: x**2)
    assert abs(sobolev_norm(space, c, 0.0) - math.sqrt(1/5)) < 1e-12
    assert sobolev_norm(space, c, 0.4) > sobolev_norm(space, c, 0.0)

def test_seminorm_rejects_exterior_high_order():
    space = BrokenSpace1D(uniform_mesh(3), 1)
    with pytest.raises(DomainError):
        seminorm_matrix(space, 0.6, exterior=True)

def test_dual_norm():
    b = np.array([3.0, 4.0])
    assert abs(dual_norm(b, np.eye(2)) - 5.0) < 1e-14
    assert dual_norm(np.zeros(2), np.eye(2)) == 0.0
    assert abs(dual_norm(b, 4*np.eye(2)) - 2.5) < 1e-14
