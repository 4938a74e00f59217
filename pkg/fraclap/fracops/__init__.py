# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

from .params import FractionalParams, kernel_constant, dtn_constant, getoor_constant
from .quadrature import QuadratureRule, gauss_jacobi, gauss_legendre, composite_gauss, \
    set_cache_dir
from .pv import pv_apply, pv_apply_many, default_eps_split
from .fem1d import Mesh1D, LagrangeBasis, FESpace1D
from .bilinear import assemble_bilinear_1d, assemble_full, coercivity_constant
from .sobolev import BrokenSpace1D, seminorm_matrix, slobodeckij_seminorm, sobolev_norm, \
    dual_norm, quadratic_norm
