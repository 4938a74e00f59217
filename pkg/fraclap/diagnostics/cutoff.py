# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

from typing import Sequence, Tuple

import numpy as np
from overrides import overrides

from ..common.errors import DomainError
from ..fields.scalar_field import ScalarField


# max |S'| of the quintic smoothstep S on [0, 1]
C_ZETA = 15.0/8.0


def _smoothstep(t:np.ndarray, order:int)->np.ndarray:
    """1 - (10t³ - 15t⁴ + 6t⁵) and its first two derivatives, t in [0, 1]."""
    if order == 0:
        return 1.0 - t**3*(10.0 - 15.0*t + 6.0*t*t)
    if order == 1:
        return -30.0*t*t*(1.0 - t)**2
    return -60.0*t*(1.0 - t)*(1.0 - 2.0*t)


class SmoothCutoff(ScalarField):
    """C² radial bump: 1 on B_{cR}(center), 0 outside B_R(center), with
    ‖∇ζ‖∞ = C_ZETA/((1-c)R). Second derivatives exist in one dimension,
    gradients in two."""
    def __init__(self, center:Sequence[float], R:float, c:float=0.5) -> None:
        center = np.atleast_1d(np.asarray(center, dtype=float))
        if not R > 0:
            raise DomainError(f'cutoff radius R={R} must be positive')
        if not 0.0 < c < 1.0:
            raise DomainError(f'inner fraction c={c} must lie in (0, 1)')
        dim = len(center)
        super().__init__(dim, 'analytic', 2 if dim == 1 else 1, (center - R, center + R))
        self.center, self.R, self.c = center, float(R), float(c)

    @property
    def width(self)->float:
        return (1.0 - self.c)*self.R

    @property
    def grad_sup(self)->float:
        return C_ZETA/self.width

    def _radial(self, r:np.ndarray, order:int)->np.ndarray:
        t = np.clip((r - self.c*self.R)/self.width, 0.0, 1.0)
        out = _smoothstep(t, order)/self.width**order
        return np.where(r < self.R, out, 0.0) if order == 0 else out

    @overrides
    def _partial(self, pts:np.ndarray, beta:Tuple[int, ...])->np.ndarray:
        d = pts - self.center
        order = sum(beta)
        if self.dim == 1:
            x = d[:, 0]
            sign = np.sign(x)**order
            return sign*self._radial(np.abs(x), order)
        r = np.linalg.norm(d, axis=1)
        if order == 0:
            return self._radial(r, 0)
        axis = beta.index(1)
        with np.errstate(divide='ignore', invalid='ignore'):
            unit = np.where(r > 0, d[:, axis]/r, 0.0)
        return self._radial(r, 1)*unit


def smooth_cutoff(center:Sequence[float], R:float, c:float=0.5)->SmoothCutoff:
    return SmoothCutoff(center, R, c)
