# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

from typing import Tuple

import numpy as np

from ..common.errors import DomainError
from ..fracops.fem1d import Mesh1D


def graded_mesh(n:int, beta:float, interval:Tuple[float, float]=(0.0, 1.0))->Mesh1D:
    """n elements graded toward both ends: with t = k/n the k-th node sits at
    a + L·g(t), g(t) = (2t)^β/2 for t ≤ 1/2 and mirrored above. β = 1 is uniform.

    On the left half the nodes are (k/n)^β scaled by 2^{β-1}, the factor that
    puts the middle node at a + L/2; β = 2, n = 4 gives 2·(1/16) = 1/8."""
    if n < 2:
        raise DomainError(f'graded mesh needs n >= 2 elements, got {n}')
    if beta < 1.0:
        raise DomainError(f'grading exponent beta={beta} must be >= 1')
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        raise DomainError(f'empty interval ({a}, {b})')
    k = np.arange(n + 1)
    # mirror by index so the mesh is exactly symmetric
    left = 0.5*(2.0*k/n)**beta
    g = np.where(2*k <= n, left, 1.0 - 0.5*(2.0*(n - k)/n)**beta)
    nodes = a + (b - a)*g
    nodes[0], nodes[-1] = a, b
    return Mesh1D(nodes)

def uniform_mesh(n:int, interval:Tuple[float, float]=(0.0, 1.0))->Mesh1D:
    return graded_mesh(n, 1.0, interval)

def default_grading(s:float)->float:
    return 2.0 if s <= 0.5 else 3.0
