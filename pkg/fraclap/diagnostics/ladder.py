# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Geometric panel ladders for integrals that may be singular at one end.

An interval (0, L) is cut into panels (L 2^{-k-1}, L 2^{-k}), each carrying
a Gauss-Legendre rule. Near the singular end an integrand behaves like a
power c·r^γ, so consecutive panel sums shrink by q = 2^{-(γ+1)}. The part
below the last panel is the geometric series of that ratio, and q ≥ 1 means
the integral diverges.
"""

from dataclasses import dataclass
import math
from typing import Tuple

import numpy as np

from ..common.errors import DomainError
from ..fracops.quadrature import gauss_jacobi, gauss_legendre


@dataclass(frozen=True)
class Ladder:
    """Nodes and weights of shape (panels, gauss), panel 0 at the far end.
    `singular` tells whether the ladder stops short of r = 0, in which case
    the remainder is extrapolated."""
    nodes: np.ndarray
    weights: np.ndarray
    singular: bool

    @property
    def n_panels(self)->int:
        return self.nodes.shape[0]


def ladder(hi:float, lo:float=0.0, n_panels:int=30, n_gauss:int=8,
           stop:float=0.0)->Ladder:
    """Panels from hi down to lo halving in length. With lo = 0 there are
    n_panels of them, fewer when `stop` > 0 cuts the ladder at that scale."""
    if not hi > lo >= 0.0:
        raise DomainError(f'ladder needs 0 <= lo < hi, got ({lo}, {hi})')
    if lo > 0.0:
        k = max(1, int(math.ceil(math.log2(hi/lo) - 1e-12)))
        edges = hi*0.5**np.arange(k + 1)
        edges[-1] = lo
        singular = False
    else:
        if stop > 0.0:
            n_panels = min(n_panels, int(math.floor(math.log2(hi/stop))))
        n_panels = max(n_panels, 3)
        edges = hi*0.5**np.arange(n_panels + 1)
        singular = True
    rule = gauss_legendre(n_gauss)
    a, b = edges[1:], edges[:-1]
    nodes = a[:, None] + (b - a)[:, None]*rule.nodes[None, :]
    weights = (b - a)[:, None]*rule.weights[None, :]
    return Ladder(nodes, weights, singular)


def ladder_total(panels:np.ndarray, singular:bool,
                 min_exponent:float)->Tuple[np.ndarray, np.ndarray]:
    """Totals over the last axis of nonnegative panel sums, panel 0 first,
    with the geometric remainder added when `singular`. Returns (totals,
    diverged); diverged entries are +inf. The decay exponent of the last two
    panels, -log2(q), must exceed `min_exponent`."""
    panels = np.asarray(panels, dtype=float)
    total = panels.sum(axis=-1)
    finite = np.all(np.isfinite(panels), axis=-1)
    if not singular:
        diverged = ~finite
        return np.where(diverged, np.inf, total), diverged

    last, prev = panels[..., -1], panels[..., -2]
    with np.errstate(divide='ignore', invalid='ignore'):
        q = np.where(prev > 0, last/prev, np.where(last > 0, np.inf, 0.0))
    q_max = 2.0**(-min_exponent)
    diverged = ~finite | (q >= q_max)
    safe_q = np.where(diverged, 0.0, q)
    tail = last*safe_q/(1.0 - safe_q)
    return np.where(diverged, np.inf, total + tail), diverged


def ladder_integral(g, hi:float, lo:float=0.0, n_panels:int=30, n_gauss:int=8,
                    min_exponent:float=1e-6, stop:float=0.0)->float:
    """∫_lo^hi g(r) dr for a vectorized nonnegative g, +inf if divergent."""
    lad = ladder(hi, lo, n_panels, n_gauss, stop)
    vals = np.asarray(g(lad.nodes.ravel()), dtype=float).reshape(lad.nodes.shape)
    total, _ = ladder_total(np.sum(lad.weights*vals, axis=1), lad.singular, min_exponent)
    return float(total)


def weighted_y_rule(exponent:float, height:float, n_gauss:int=10,
                    n_panels:int=6)->Tuple[np.ndarray, np.ndarray]:
    """Rule for ∫_0^height y^exponent g(y) dy with g bounded: Gauss-Jacobi on
    the lowest panel, the weight folded into Gauss-Legendre weights above it."""
    if not height > 0:
        raise DomainError(f'height {height} must be positive')
    edges = height*0.5**np.arange(n_panels + 1)
    low = gauss_jacobi(exponent, n_gauss, (0.0, edges[-1]))
    rule = gauss_legendre(n_gauss)
    a, b = edges[1:], edges[:-1]
    y = (a[:, None] + (b - a)[:, None]*rule.nodes[None, :]).ravel()
    w = ((b - a)[:, None]*rule.weights[None, :]).ravel()*y**exponent
    return np.concatenate([low.nodes, y]), np.concatenate([low.weights, w])
