# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

import math

import numpy as np
import pytest

from fraclap.common.errors import ConfigError, DomainError
from fraclap.fields import ConstantField, PolynomialField, PowerField, ExpField, SineField, \
    GetoorField, SeparableField, BesselExtensionField, CornerField, CombinationField, \
    ProductField, RestrictedField, GridField, bessel_profile, falling_factorial, create_field


def _fd(f, x, h=1e-5):
    return (f(x + h) - f(x - h))/(2*h)

def test_falling_factorial():
    assert falling_factorial(0.5, 0) == 1.0
    assert falling_factorial(3.0, 2) == 6.0
    assert falling_factorial(2.0, 3) == 0.0

def test_power_field_derivatives():
    u = PowerField(0.5, vertex=1.0, side=-1)
    x = np.array([0.2, 0.5, 0.9])
    assert np.allclose(u.value(x), np.sqrt(1 - x))
    assert np.allclose(u.derivative(x, 1), -0.5/np.sqrt(1 - x))
    assert np.allclose(u.derivative(x, 3), -0.375*(1 - x)**-2.5)
    assert np.all(u.value(np.array([1.0, 1.5])) == 0.0)

def test_getoor_derivatives_match_fd():
    s = 0.3
    u = GetoorField(s)
    x = np.linspace(-0.8, 0.8, 7)
    for p in range(3):
        fd = _fd(lambda z: u.derivative(z, p), x)
        assert np.allclose(fd, u.derivative(x, p + 1), rtol=1e-6, atol=1e-7)
    assert np.all(u.value(np.array([-1.0, 1.0, 2.0])) == 0.0)

def test_getoor_2d():
    u = GetoorField(0.5, dim=2)
    pts = np.array([[0.0, 0.0], [0.3, 0.4], [0.8, 0.8]])
    assert np.allclose(u.value(pts), [1.0, math.sqrt(0.75), 0.0])
    g = u.gradient(pts[1:2])
    assert np.allclose(g[0], [-0.3/math.sqrt(0.75), -0.4/math.sqrt(0.75)])
    with pytest.raises(DomainError):
        u.partial(pts, (2, 0))

def test_combination_and_product():
    u = SineField(2.0)
    v = ExpField(0.5)
    w = ProductField(u, v)
    x = np.array([0.1, 0.7])
    for p in range(4):
        fd = _fd(lambda z: w.derivative(z, p), x)
        assert np.allclose(fd, w.derivative(x, p + 1), rtol=1e-6)
    c = CombinationField([u, v], [2.0, -1.0])
    assert np.allclose(c.value(x), 2*np.sin(2*x) - np.exp(0.5*x))
    assert c.is_analytic()

def test_restricted_field():
    u = RestrictedField(PolynomialField([1.0, 1.0]), [0.0], [1.0])
    assert np.allclose(u.value(np.array([-0.5, 0.5, 1.5])), [0.0, 1.5, 0.0])
    assert u.support[0][0] == 0.0

def test_partial_validation():
    u = ConstantField(2.0, dim=2)
    with pytest.raises(DomainError):
        u.partial(np.zeros((1, 2)), (1,))
    with pytest.raises(DomainError):
        u.derivative(np.zeros(1), 1)

def test_directional_matches_partials():
    u = SeparableField([SineField(1.3), ExpField(0.7)])
    pts = np.array([[0.2, 0.4], [-0.5, 1.0]])
    t = np.array([1.0, 1.0])/math.sqrt(2)
    d = u.directional(pts, t, 1, 0)
    expected = (u.partial(pts, (1, 0)) + u.partial(pts, (0, 1)))/math.sqrt(2)
    assert np.allclose(d, expected)
    # normal of the x axis tangent is the y axis
    assert np.allclose(u.directional(pts, [1.0, 0.0], 0, 2), u.partial(pts, (0, 2)))

def test_bessel_profile_ode():
    for s in (0.3, 0.5, 0.8):
        t = np.array([0.3, 1.0, 2.5])
        psi, d1, d2 = (bessel_profile(s, t, k) for k in range(3))
        assert np.allclose(d2 + (1 - 2*s)/t*d1, psi, rtol=1e-10)
        assert np.allclose(_fd(lambda z: bessel_profile(s, z), t), d1, rtol=1e-6)
    assert bessel_profile(0.3, np.array([0.0]))[0] == 1.0
    assert np.allclose(bessel_profile(0.5, np.array([1.0]), 4), math.exp(-1))

def test_bessel_extension_trace():
    U = BesselExtensionField(0.5, [2.0])
    x = np.linspace(0, 1, 5)
    pts = np.stack([x, np.zeros_like(x)], axis=1)
    assert np.allclose(U.value(pts), U.trace().value(x))
    pts = np.array([[0.3, 0.4]])
    assert np.allclose(U.partial(pts, (0, 1)), -2.0*np.sin(0.6)*np.exp(-0.8))

def test_corner_field_vanishes_on_edges():
    theta = 1.5*math.pi
    u = CornerField.for_corner(theta, (0.0, 0.0), 0.0)
    r = np.array([0.1, 0.5])
    on_first = np.stack([r, np.zeros_like(r)], axis=1)
    on_second = np.stack([r*math.cos(theta), r*math.sin(theta)], axis=1)
    assert np.allclose(u.value(on_first), 0.0, atol=1e-12)
    assert np.allclose(u.value(on_second), 0.0, atol=1e-12)
    pts = np.array([[-0.3, 0.2], [0.1, 0.4]])
    lap = u.partial(pts, (2, 0)) + u.partial(pts, (0, 2))
    assert np.allclose(lap, 0.0, atol=1e-10)
    lam = math.pi/theta
    mid = np.array([[0.5*math.cos(theta/2), 0.5*math.sin(theta/2)]])
    assert np.allclose(u.value(mid), 0.5**lam)

def test_grid_field():
    x = np.linspace(0, 1, 3)
    y = np.linspace(0, 2, 3)
    g = GridField([x, y], np.add.outer(x, y))
    assert np.allclose(g.value(np.array([[0.25, 0.5]])), 0.75)
    assert g.value(np.array([[2.0, 0.0]]))[0] == 0.0
    assert not g.is_analytic()


def test_create_field_types():
    x = np.linspace(-0.9, 0.9, 7)
    assert create_field(None, 1) is None
    assert create_field({'type': ''}, 1) is None
    assert np.all(create_field({'type': 'zero'}, 1).value(x) == 0.0)
    assert np.allclose(create_field({'type': 'constant', 'value': 2.5}, 1).value(x), 2.5)
    poly = create_field({'type': 'polynomial', 'coeffs': [1.0, 0.0, -1.0]}, 1)
    assert np.allclose(poly.value(x), 1 - x**2)
    power = create_field({'type': 'power', 'a': 0.5, 'vertex': -1.0}, 1)
    assert np.allclose(power.value(x), np.sqrt(x + 1))
    sine = create_field({'type': 'sine', 'k': 2.0, 'phase': None}, 1)
    assert np.allclose(sine.value(x), np.sin(2*x))
    total = create_field({'type': 'sum', 'terms': [{'type': 'exp', 'k': 1.0},
                                                   {'type': 'constant', 'value': 1.0}],
                          'coeffs': [2.0, -1.0]}, 1)
    assert np.allclose(total.value(x), 2*np.exp(x) - 1)
    getoor = create_field({'type': 'getoor', 's': 0.5, 'radius': 1.0}, 1)
    assert np.allclose(getoor.value(x), np.sqrt(1 - x**2))

def test_create_field_in_the_plane():
    pts = np.array([[0.25, 0.5], [0.5, 0.75]])
    bubble = create_field({'type': 'product',
                           'u': {'type': 'polynomial', 'coeffs': [0.0, 1.0, -1.0], 'axis': 0},
                           'v': {'type': 'polynomial', 'coeffs': [0.0, 1.0, -1.0], 'axis': 1}}, 2)
    assert np.allclose(bubble.value(pts), pts[:, 0]*(1 - pts[:, 0])*pts[:, 1]*(1 - pts[:, 1]))
    sep = create_field({'type': 'separable', 'factors': [{'type': 'sine', 'k': 1.0},
                                                         {'type': 'exp', 'k': -1.0}]}, 2)
    assert np.allclose(sep.value(pts), np.sin(pts[:, 0])*np.exp(-pts[:, 1]))
    theta = 1.5*math.pi
    corner = create_field({'type': 'corner', 'theta': theta, 'vertex': [0.0, 0.0]}, 2)
    ref = CornerField.for_corner(theta, (0.0, 0.0), 0.0)
    assert np.allclose(corner.value(pts), ref.value(pts))

@pytest.mark.parametrize('spec,dim', [
    ({'type': 'spline'}, 1),
    ({'type': 'polynomial'}, 1),
    ({'type': 'power', 'a': 0.5, 'side': 2}, 1),
    ({'type': 'corner', 'theta': 1.0}, 1),
    ({'type': 'separable', 'factors': [{'type': 'zero'}]}, 2),
    ({'type': 'constant', 'value': 'one'}, 1),
    ([1.0, 2.0], 1),
])
def test_create_field_rejects(spec, dim):
    with pytest.raises(ConfigError):
        create_field(spec, dim)
