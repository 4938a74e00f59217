# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

from .ymesh import y_mesh, weighted_rule, weighted_matrices, weighted_moment
from .tensor import TensorDiscretization, trace_mesh_1d, box_grid
from .solver import ExtensionField, solve_extension, extend_trace, random_admissible_fields, \
    DIRECT_LIMIT
from .dtn import dtn_from_levels, dtn_weak, dtn_trace, DTN_METHODS
from .checks import NCheckReport, n_check, F_norm, poincare_check, trace_inequality_check, \
    multiplicative_trace_check, shift_theorem_probe, shift_probe_grid, SHIFT_PROBE_GRID
