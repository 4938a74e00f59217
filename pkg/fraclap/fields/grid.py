# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

from typing import Sequence, Tuple

import numpy as np
from overrides import overrides
from scipy.interpolate import RegularGridInterpolator

from .scalar_field import ScalarField


class GridField(ScalarField):
    """Piecewise (multi)linear interpolant of samples on a tensor grid, zero
    outside the grid. Only values are available."""
    def __init__(self, axes:Sequence[np.ndarray], values:np.ndarray) -> None:
        axes = [np.asarray(a, dtype=float) for a in axes]
        values = np.asarray(values, dtype=float)
        if values.shape != tuple(len(a) for a in axes):
            raise ValueError(f'values of shape {values.shape} do not match grid axes')
        res = min(float(np.min(np.diff(a))) for a in axes) if all(len(a) > 1 for a in axes) else None
        super().__init__(len(axes), 'discrete', 0,
                         ([a[0] for a in axes], [a[-1] for a in axes]), res)
        self.axes, self.values = axes, values
        self._interp = RegularGridInterpolator(axes, values, method='linear',
                                               bounds_error=False, fill_value=0.0)

    @overrides
    def _partial(self, pts:np.ndarray, beta:Tuple[int, ...])->np.ndarray:
        return self._interp(pts)
