# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

from abc import ABC, abstractmethod
from itertools import product
from typing import Optional, Sequence, Tuple

import numpy as np
from overrides import EnforceOverrides, overrides
from scipy.special import comb

from ..common.errors import DomainError
from ..common.utils import as_points


# derivative order accepted by closed-form families
ANY_ORDER = 1 << 30

TSupport = Optional[Tuple[np.ndarray, np.ndarray]]


class ScalarField(ABC, EnforceOverrides):
    """A function u on R^dim (or U on the half space, the last coordinate
    being y) that can be evaluated together with its partial derivatives.

    `kind` is 'analytic' for closed forms with exact derivatives of every
    order and 'discrete' for Galerkin functions, whose derivatives are only
    trusted up to `p_max`. `support` is a bounding box (lo, hi) outside which
    the field vanishes, None if unbounded. `resolution` is the mesh scale of a
    discrete field, None for analytic ones.
    """
    def __init__(self, dim:int, kind:str, p_max:int,
                 support:TSupport=None, resolution:Optional[float]=None) -> None:
        if kind not in ('analytic', 'discrete'):
            raise ValueError(f'unknown field kind "{kind}"')
        self.dim = dim
        self.kind = kind
        self.p_max = p_max
        self.support = None if support is None else \
            (np.atleast_1d(np.asarray(support[0], dtype=float)),
             np.atleast_1d(np.asarray(support[1], dtype=float)))
        self.resolution = resolution

    @abstractmethod
    def _partial(self, pts:np.ndarray, beta:Tuple[int, ...])->np.ndarray:
        """∂^beta at pts of shape (n, dim), returns shape (n,)."""

    def partial(self, points, beta:Sequence[int])->np.ndarray:
        beta = tuple(int(b) for b in beta)
        if len(beta) != self.dim or min(beta) < 0:
            raise DomainError(f'multi-index {beta} does not fit a field of dimension {self.dim}')
        if sum(beta) > self.p_max:
            raise DomainError(f'derivative order {sum(beta)} exceeds p_max={self.p_max} of this {self.kind} field')
        return self._partial(as_points(points, self.dim), beta)

    def value(self, points)->np.ndarray:
        return self.partial(points, (0,)*self.dim)

    def __call__(self, points)->np.ndarray:
        return self.value(points)

    def derivative(self, x, order:int)->np.ndarray:
        """d^order/dx^order of a one dimensional field."""
        if self.dim != 1:
            raise DomainError('derivative() is for one dimensional fields, use partial()')
        return self.partial(x, (order,))

    def gradient(self, points)->np.ndarray:
        pts = as_points(points, self.dim)
        cols = [self.partial(pts, tuple(int(i==j) for j in range(self.dim)))
                for i in range(self.dim)]
        return np.stack(cols, axis=1)

    def directional(self, points, tangent:Sequence[float], p_par:int, p_perp:int,
                    y_order:int=0)->np.ndarray:
        """D∥^p_par D⊥^p_perp in the first two coordinates, with D∥ along the
        unit `tangent` and D⊥ along its left normal. Extra coordinates (the
        extension variable y) are differentiated `y_order` times."""
        if self.dim < 2:
            raise DomainError('directional derivatives need at least two coordinates')
        t = np.asarray(tangent, dtype=float)
        t = t / np.linalg.norm(t)
        n = np.array([-t[1], t[0]])
        pts = as_points(points, self.dim)
        tail = (0,)*(self.dim-3) + ((y_order,) if self.dim > 2 else ())
        if self.dim == 2 and y_order:
            raise DomainError('y_order needs a field on the half space')
        out = np.zeros(len(pts))
        for i, j in product(range(p_par+1), range(p_perp+1)):
            coef = comb(p_par, i, exact=True) * comb(p_perp, j, exact=True) \
                * t[0]**i * t[1]**(p_par-i) * n[0]**j * n[1]**(p_perp-j)
            if coef == 0.0:
                continue
            beta = (i+j, p_par-i+p_perp-j) + tail
            out += coef * self.partial(pts, beta)
        return out

    def is_analytic(self)->bool:
        return self.kind == 'analytic'


class CombinationField(ScalarField):
    """Σ c_k u_k."""
    def __init__(self, fields:Sequence[ScalarField], coeffs:Sequence[float]) -> None:
        if len(fields) != len(coeffs) or not fields:
            raise ValueError('fields and coeffs must be nonempty and of equal length')
        dim = fields[0].dim
        if any(f.dim != dim for f in fields):
            raise ValueError('all combined fields must have the same dimension')
        kind = 'analytic' if all(f.is_analytic() for f in fields) else 'discrete'
        supports = [f.support for f in fields]
        support = None
        if all(s is not None for s in supports):
            support = (np.min([s[0] for s in supports], axis=0),
                       np.max([s[1] for s in supports], axis=0))
        res = [f.resolution for f in fields if f.resolution is not None]
        super().__init__(dim, kind, min(f.p_max for f in fields), support,
                         min(res) if res else None)
        self.fields, self.coeffs = list(fields), [float(c) for c in coeffs]

    @overrides
    def _partial(self, pts:np.ndarray, beta:Tuple[int, ...])->np.ndarray:
        out = np.zeros(len(pts))
        for c, f in zip(self.coeffs, self.fields):
            if c != 0.0:
                out += c * f._partial(pts, beta)
        return out


def scaled(field:ScalarField, c:float)->ScalarField:
    return CombinationField([field], [c])


class ProductField(ScalarField):
    """u·v with derivatives by the Leibniz rule."""
    def __init__(self, u:ScalarField, v:ScalarField) -> None:
        if u.dim != v.dim:
            raise ValueError('factors must have the same dimension')
        kind = 'analytic' if u.is_analytic() and v.is_analytic() else 'discrete'
        support = u.support if v.support is None else v.support
        if u.support is not None and v.support is not None:
            support = (np.maximum(u.support[0], v.support[0]),
                       np.minimum(u.support[1], v.support[1]))
        res = [f.resolution for f in (u, v) if f.resolution is not None]
        super().__init__(u.dim, kind, min(u.p_max, v.p_max), support,
                         min(res) if res else None)
        self.u, self.v = u, v

    @overrides
    def _partial(self, pts:np.ndarray, beta:Tuple[int, ...])->np.ndarray:
        out = np.zeros(len(pts))
        for gamma in product(*[range(b+1) for b in beta]):
            coef = 1.0
            for b, g in zip(beta, gamma):
                coef *= comb(b, g, exact=True)
            rest = tuple(b-g for b, g in zip(beta, gamma))
            out += coef * self.u._partial(pts, gamma) * self.v._partial(pts, rest)
        return out


class RestrictedField(ScalarField):
    """Zero extension of `field` outside the box [lo, hi]."""
    def __init__(self, field:ScalarField, lo, hi) -> None:
        super().__init__(field.dim, field.kind, field.p_max, (lo, hi), field.resolution)
        self.field = field

    @overrides
    def _partial(self, pts:np.ndarray, beta:Tuple[int, ...])->np.ndarray:
        lo, hi = self.support
        inside = np.all((pts > lo) & (pts < hi), axis=1)
        out = np.zeros(len(pts))
        if np.any(inside):
            out[inside] = self.field._partial(pts[inside], beta)
        return out
