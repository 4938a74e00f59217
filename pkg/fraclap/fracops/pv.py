# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

import warnings
from typing import List, Optional, Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from ..common.errors import DomainError, QuadratureToleranceError
from ..fields.scalar_field import ScalarField
from .params import FractionalParams
from .quadrature import gauss_jacobi


def default_eps_split(u:ScalarField)->float:
    """min(h/2, 1e-3·|Ω|) with h the field's resolution (|Ω| if analytic)."""
    length = float(u.support[1][0] - u.support[0][0]) if u.support is not None else 1.0
    h = u.resolution if u.resolution is not None else length
    return min(0.5*h, 1e-3*length)

def _kinks(u:ScalarField, x:float)->List[float]:
    """Offsets t > 0 at which u(x ± t) may be non-smooth."""
    pts = []
    if u.support is not None:
        pts += [u.support[0][0], u.support[1][0]]
    breaks = getattr(u, 'breakpoints', None)
    if breaks is not None:
        pts += list(np.asarray(breaks(), dtype=float))
    return sorted({abs(p - x) for p in pts if abs(p - x) > 0})

def pv_apply(u:ScalarField, x:float, params:FractionalParams,
             eps_split:Optional[float]=None, tol:float=1e-9, n_inner:int=24)->float:
    """(-Δ)^s u(x) in one dimension from the principal value integral.

    With the symmetric form C ∫_0^∞ (2u(x) - u(x+t) - u(x-t)) t^{-1-2s} dt the
    odd Taylor term cancels. On (0, eps_split) the integrand is written as
    [(2u(x) - u(x+t) - u(x-t))/t²]·t^{1-2s} and integrated by Gauss-Jacobi;
    beyond it adaptive quadrature runs panel by panel between the points where
    u(x ± t) is non-smooth, and the part where u(x ± t) vanishes is integrated
    in closed form. u is zero outside u.support; without a support the outer
    integral runs to infinity.
    """
    if params.d != 1 or u.dim != 1:
        raise DomainError('pv_apply evaluates one dimensional fields only')
    x = float(x)
    s = params.s
    eps = default_eps_split(u) if eps_split is None else float(eps_split)
    kinks = _kinks(u, x)
    if kinks:
        # u must be smooth on (x - eps, x + eps)
        eps = min(eps, 0.5*kinks[0])
    if not eps > 0:
        raise DomainError(f'eps_split must be positive, got {eps}')

    ux = float(u.value(np.array([x]))[0])

    def second_diff(t:np.ndarray)->np.ndarray:
        t = np.asarray(t, dtype=float)
        return 2*ux - u.value(x + t) - u.value(x - t)

    rule = gauss_jacobi(1.0 - 2*s, n_inner, (0.0, eps))
    inner = float(np.dot(rule.weights, second_diff(rule.nodes) / rule.nodes**2))

    def integrand(t:float)->float:
        return float(second_diff(np.array([t]))[0]) * t**(-1.0 - 2*s)

    # geometric panels away from eps, then the kink-to-kink panels
    ends = [k for k in kinks if k > eps]
    first = ends[0] if ends else 2*eps
    panels = [eps]
    while panels[-1]*4 < first:
        panels.append(panels[-1]*4)
    panels += ends if ends else [first]

    outer, err = 0.0, 0.0
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', IntegrationWarning)
        for a, b in zip(panels[:-1], panels[1:]):
            val, e = quad(integrand, a, b, epsabs=0.1*tol, epsrel=1e-13, limit=200)
            outer += val
            err += e
        if u.support is not None:
            # beyond the last kink both u(x ± t) vanish
            last = panels[-1]
            outer += 2*ux * last**(-2*s) / (2*s)
        else:
            val, e = quad(integrand, panels[-1], np.inf, epsabs=0.1*tol, epsrel=1e-13, limit=400)
            outer += val
            err += e

    value = params.C_ds * (inner + outer)
    if not np.isfinite(value) or params.C_ds*err > tol*max(1.0, abs(value)):
        raise QuadratureToleranceError(f'principal value at x={x} did not converge',
                                       achieved=params.C_ds*err, value=value)
    return value

def pv_apply_many(u:ScalarField, xs:Sequence[float], params:FractionalParams,
                  eps_split:Optional[float]=None, tol:float=1e-9)->np.ndarray:
    return np.array([pv_apply(u, x, params, eps_split, tol) for x in xs])
