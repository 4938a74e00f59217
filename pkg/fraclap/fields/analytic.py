# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Closed-form fields with exact derivatives."""

import math
from typing import Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from overrides import overrides
from scipy.special import comb, gammaln, kv

from ..common.errors import DomainError
from .scalar_field import ANY_ORDER, ScalarField


def falling_factorial(a:float, p:int)->float:
    """a(a-1)...(a-p+1), 1 for p = 0."""
    out = 1.0
    for i in range(p):
        out *= (a - i)
    return out


class ConstantField(ScalarField):
    def __init__(self, c:float, dim:int=1) -> None:
        super().__init__(dim, 'analytic', ANY_ORDER)
        self.c = float(c)

    @overrides
    def _partial(self, pts:np.ndarray, beta:Tuple[int, ...])->np.ndarray:
        if sum(beta):
            return np.zeros(len(pts))
        return np.full(len(pts), self.c)


class AxisField(ScalarField):
    """Field depending on a single coordinate `axis`; subclasses supply the
    one dimensional derivative family."""
    def __init__(self, dim:int, axis:int, support=None) -> None:
        super().__init__(dim, 'analytic', ANY_ORDER, support)
        self.axis = axis

    def d1(self, x:np.ndarray, order:int)->np.ndarray:
        raise NotImplementedError

    @overrides
    def _partial(self, pts:np.ndarray, beta:Tuple[int, ...])->np.ndarray:
        if any(b for i, b in enumerate(beta) if i != self.axis):
            return np.zeros(len(pts))
        return self.d1(pts[:, self.axis], beta[self.axis])


class PolynomialField(AxisField):
    """Σ coeffs[k] x^k."""
    def __init__(self, coeffs:Sequence[float], dim:int=1, axis:int=0) -> None:
        super().__init__(dim, axis)
        self.poly = Polynomial(np.asarray(coeffs, dtype=float))

    @overrides
    def d1(self, x:np.ndarray, order:int)->np.ndarray:
        if order > self.poly.degree():
            return np.zeros(len(x))
        return self.poly.deriv(order)(x) if order else self.poly(x)


class PowerField(AxisField):
    """coeff·((x - vertex)·side)_+^a, a one-sided power vanishing at the vertex
    for a > 0."""
    def __init__(self, a:float, vertex:float=0.0, side:int=1, coeff:float=1.0,
                 dim:int=1, axis:int=0) -> None:
        if side not in (1, -1):
            raise ValueError('side must be +1 or -1')
        super().__init__(dim, axis)
        self.a, self.vertex, self.side, self.coeff = float(a), float(vertex), side, float(coeff)

    @overrides
    def d1(self, x:np.ndarray, order:int)->np.ndarray:
        z = self.side * (x - self.vertex)
        ff = falling_factorial(self.a, order)
        out = np.zeros(len(x))
        pos = z > 0
        if ff != 0.0 and np.any(pos):
            out[pos] = self.coeff * self.side**order * ff * z[pos]**(self.a - order)
        return out


class ExpField(AxisField):
    """coeff·exp(k x)."""
    def __init__(self, k:float=1.0, coeff:float=1.0, dim:int=1, axis:int=0) -> None:
        super().__init__(dim, axis)
        self.k, self.coeff = float(k), float(coeff)

    @overrides
    def d1(self, x:np.ndarray, order:int)->np.ndarray:
        return self.coeff * self.k**order * np.exp(self.k * x)


class SineField(AxisField):
    """coeff·sin(k x + phase)."""
    def __init__(self, k:float=1.0, phase:float=0.0, coeff:float=1.0,
                 dim:int=1, axis:int=0) -> None:
        super().__init__(dim, axis)
        self.k, self.phase, self.coeff = float(k), float(phase), float(coeff)

    @overrides
    def d1(self, x:np.ndarray, order:int)->np.ndarray:
        return self.coeff * self.k**order * np.sin(self.k*x + self.phase + order*np.pi/2)


class GetoorField(ScalarField):
    """(1 - |x - center|²/radius²)_+^s, whose fractional Laplacian is constant
    inside the ball. In one dimension derivatives of every order are exact, in
    two dimensions up to first order."""
    def __init__(self, s:float, dim:int=1, radius:float=1.0, center=None) -> None:
        center = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
        super().__init__(dim, 'analytic', ANY_ORDER if dim == 1 else 1,
                         (center - radius, center + radius))
        self.s, self.radius, self.center = float(s), float(radius), center

    @overrides
    def _partial(self, pts:np.ndarray, beta:Tuple[int, ...])->np.ndarray:
        z = (pts - self.center) / self.radius
        out = np.zeros(len(pts))
        if self.dim == 1:
            x = z[:, 0]
            inside = np.abs(x) < 1
            xi = x[inside]
            p = beta[0]
            acc = np.zeros(len(xi))
            # Leibniz on (1-x)^s (1+x)^s
            for j in range(p+1):
                left = (-1)**j * falling_factorial(self.s, j) * (1 - xi)**(self.s - j)
                right = falling_factorial(self.s, p-j) * (1 + xi)**(self.s - p + j)
                acc += comb(p, j, exact=True) * left * right
            out[inside] = acc / self.radius**p
            return out
        q = 1.0 - np.sum(z**2, axis=1)
        inside = q > 0
        order = sum(beta)
        if order == 0:
            out[inside] = q[inside]**self.s
        else:
            axis = beta.index(1)
            out[inside] = -2*self.s*z[inside, axis]*q[inside]**(self.s-1) / self.radius
        return out


class SeparableField(ScalarField):
    """Π_i f_i(x_i) with one dimensional factors."""
    def __init__(self, factors:Sequence[ScalarField]) -> None:
        if any(f.dim != 1 for f in factors):
            raise ValueError('factors of a separable field must be one dimensional')
        kind = 'analytic' if all(f.is_analytic() for f in factors) else 'discrete'
        res = [f.resolution for f in factors if f.resolution is not None]
        support = None
        if all(f.support is not None for f in factors):
            support = (np.concatenate([f.support[0] for f in factors]),
                       np.concatenate([f.support[1] for f in factors]))
        super().__init__(len(factors), kind, min(f.p_max for f in factors), support,
                         min(res) if res else None)
        self.factors = list(factors)

    @overrides
    def _partial(self, pts:np.ndarray, beta:Tuple[int, ...])->np.ndarray:
        out = np.ones(len(pts))
        for i, (f, b) in enumerate(zip(self.factors, beta)):
            out *= f._partial(pts[:, i:i+1], (b,))
        return out


def bessel_profile(s:float, t:np.ndarray, order:int=0)->np.ndarray:
    """ψ(t) = 2^{1-s}/Γ(s) t^s K_s(t) and its derivatives, ψ(0) = 1. ψ solves
    ψ'' + (1-2s)/t ψ' = ψ. At s = 1/2 it is e^{-t}; otherwise orders up to 2."""
    t = np.asarray(t, dtype=float)
    if abs(s - 0.5) < 1e-15:
        return (-1.0)**order * np.exp(-t)
    if order > 2:
        raise DomainError(f'bessel profile derivatives of order {order} need s = 1/2')
    c = math.exp((1-s)*math.log(2) - gammaln(s))
    out = np.zeros_like(t)
    pos = t > 0
    tp = t[pos]
    if order == 0:
        out[pos] = c * tp**s * kv(s, tp)
        out[~pos] = 1.0
    elif order == 1:
        out[pos] = -c * tp**s * kv(1-s, tp)
        # ψ'(0+) = 0 for s > 1/2 and -inf for s < 1/2
        out[~pos] = 0.0 if s > 0.5 else -np.inf
    else:
        out[pos] = c * (tp**s * kv(s, tp) + (1-2*s) * tp**(s-1) * kv(1-s, tp))
        out[~pos] = np.inf
    return out


class BesselExtensionField(ScalarField):
    """U(x, y) = sin(k·x + phase) ψ(|k| y), the extension of sin(k·x + phase)
    solving div(y^α ∇U) = 0. Points are (x_1, .., x_d, y)."""
    def __init__(self, s:float, k:Sequence[float], phase:float=0.0, coeff:float=1.0) -> None:
        k = np.atleast_1d(np.asarray(k, dtype=float))
        super().__init__(len(k)+1, 'analytic', ANY_ORDER)
        self.s, self.k, self.phase, self.coeff = float(s), k, float(phase), float(coeff)
        self.kn = float(np.linalg.norm(k))

    def trace(self)->ScalarField:
        if len(self.k) == 1:
            return SineField(self.k[0], self.phase, self.coeff)
        return _PlaneWave(self.k, self.phase, self.coeff)

    @overrides
    def _partial(self, pts:np.ndarray, beta:Tuple[int, ...])->np.ndarray:
        bx, by = beta[:-1], beta[-1]
        px = sum(bx)
        kfac = float(np.prod([kk**b for kk, b in zip(self.k, bx)]))
        phase = pts[:, :-1] @ self.k + self.phase + px*np.pi/2
        psi = bessel_profile(self.s, self.kn*pts[:, -1], by) * self.kn**by
        return self.coeff * kfac * np.sin(phase) * psi


class _PlaneWave(ScalarField):
    def __init__(self, k:np.ndarray, phase:float, coeff:float) -> None:
        super().__init__(len(k), 'analytic', ANY_ORDER)
        self.k, self.phase, self.coeff = k, phase, coeff

    @overrides
    def _partial(self, pts:np.ndarray, beta:Tuple[int, ...])->np.ndarray:
        kfac = float(np.prod([kk**b for kk, b in zip(self.k, beta)]))
        return self.coeff * kfac * np.sin(pts @ self.k + self.phase + sum(beta)*np.pi/2)


class CornerField(ScalarField):
    """Im(e^{i·phase} w^λ) with w = (z - vertex) e^{-i·bisector}, z = x_1 + i x_2.
    Harmonic away from the vertex; the branch cut points away from the
    bisector. With λ = π/θ and phase = λθ/2 it is r^λ sin(λφ), φ measured from
    the edge at angle bisector - θ/2, vanishing on both edges of a corner of
    opening θ."""
    def __init__(self, lam:float, vertex:Sequence[float]=(0.0, 0.0), bisector:float=0.0,
                 phase:float=0.0, coeff:float=1.0) -> None:
        super().__init__(2, 'analytic', ANY_ORDER)
        self.lam, self.vertex = float(lam), np.asarray(vertex, dtype=float)
        self.bisector, self.phase, self.coeff = float(bisector), float(phase), float(coeff)

    @staticmethod
    def for_corner(theta:float, vertex:Sequence[float], edge_angle:float,
                   coeff:float=1.0)->'CornerField':
        lam = math.pi / theta
        return CornerField(lam, vertex, edge_angle + theta/2, lam*theta/2, coeff)

    @overrides
    def _partial(self, pts:np.ndarray, beta:Tuple[int, ...])->np.ndarray:
        a, b = beta
        m = a + b
        z = (pts[:, 0] - self.vertex[0]) + 1j*(pts[:, 1] - self.vertex[1])
        w = z * np.exp(-1j*self.bisector)
        out = np.zeros(len(pts))
        nz = np.abs(w) > 0
        ff = falling_factorial(self.lam, m)
        if ff == 0.0:
            return out
        # ∂x = d/dz, ∂y = i d/dz for holomorphic functions
        fac = np.exp(1j*self.phase) * (1j)**b * np.exp(-1j*m*self.bisector) * ff
        out[nz] = self.coeff * np.imag(fac * w[nz]**(self.lam - m))
        return out
