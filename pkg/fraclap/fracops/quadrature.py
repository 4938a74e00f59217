# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from ..common.common import logger
from ..common.errors import DomainError


_cache_dir:Optional[str] = None

def set_cache_dir(path:Optional[str])->None:
    """Enables (or with None disables) the on-disk cache of reference rules."""
    global _cache_dir
    _cache_dir = path or None
    if _cache_dir:
        os.makedirs(_cache_dir, exist_ok=True)


@dataclass(frozen=True)
class QuadratureRule:
    """Σ w_k g(x_k) ≈ ∫ ω(x) g(x) dx on `interval`, where ω = (x - a)^e for
    side 'left', (b - x)^e for side 'right' and 1 for weight_exponent 0."""
    nodes: np.ndarray
    weights: np.ndarray
    weight_exponent: float
    interval: Tuple[float, float]
    side: str = 'left'

    @property
    def degree(self)->int:
        """Polynomial degree integrated exactly against the weight."""
        return 2*len(self.nodes) - 1

    def integrate(self, g:Callable[[np.ndarray], np.ndarray])->float:
        return float(np.dot(self.weights, g(self.nodes)))

    def weight(self, x:np.ndarray)->np.ndarray:
        a, b = self.interval
        if self.weight_exponent == 0.0:
            return np.ones_like(x)
        base = (x - a) if self.side == 'left' else (b - x)
        return base**self.weight_exponent


def _cache_file(alpha_exp:float, n:int, side:str)->Optional[str]:
    if not _cache_dir:
        return None
    return os.path.join(_cache_dir, f'gj_{alpha_exp!r}_{n}_{side}.npz')

@lru_cache(maxsize=512)
def _reference_rule(alpha_exp:float, n:int, side:str)->Tuple[np.ndarray, np.ndarray]:
    filepath = _cache_file(alpha_exp, n, side)
    if filepath and os.path.exists(filepath):
        with np.load(filepath) as data:
            x, w = data['x'], data['w']
    else:
        if alpha_exp == 0.0:
            x, w = roots_legendre(n)
        elif side == 'left':
            x, w = roots_jacobi(n, 0.0, alpha_exp)   # weight (1+t)^alpha
        else:
            x, w = roots_jacobi(n, alpha_exp, 0.0)   # weight (1-t)^alpha
    x, w = np.array(x, dtype=float), np.array(w, dtype=float)
    if filepath and not os.path.exists(filepath):
        np.savez(filepath, x=x, w=w)
        logger.debug({'quadrature_cached': filepath}, exists_ok=True)

    x.setflags(write=False)
    w.setflags(write=False)
    return x, w

def gauss_jacobi(alpha_exp:float, n:int, interval:Tuple[float, float]=(0.0, 1.0),
                 side:str='left')->QuadratureRule:
    """n-point Gauss rule for the weight (x-a)^alpha_exp ('left') or
    (b-x)^alpha_exp ('right') on interval (a, b), exact for polynomials of
    degree ≤ 2n-1 times the weight."""
    alpha_exp = float(alpha_exp)
    if not alpha_exp > -1.0:
        raise DomainError(f'Jacobi weight exponent {alpha_exp} must be > -1')
    if n < 1:
        raise DomainError(f'quadrature needs at least one point, got n={n}')
    if side not in ('left', 'right'):
        raise DomainError(f'side must be "left" or "right", got "{side}"')
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        raise DomainError(f'empty interval ({a}, {b})')
    x, w = _reference_rule(alpha_exp, int(n), side)
    half = 0.5*(b - a)
    return QuadratureRule(a + half*(x + 1.0), w * half**(alpha_exp + 1.0),
                          alpha_exp, (a, b), side)

def gauss_legendre(n:int, interval:Tuple[float, float]=(0.0, 1.0))->QuadratureRule:
    return gauss_jacobi(0.0, n, interval)

def composite_gauss(breaks:np.ndarray, n:int)->Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights with n points on every cell of `breaks`."""
    x, w = _reference_rule(0.0, int(n), 'left')
    breaks = np.asarray(breaks, dtype=float)
    a, h = breaks[:-1], np.diff(breaks)
    nodes = a[:, None] + 0.5*h[:, None]*(x[None, :] + 1.0)
    weights = 0.5*h[:, None]*w[None, :]
    return nodes.ravel(), weights.ravel()
