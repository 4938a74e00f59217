# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

from ..fields.scalar_field import ScalarField
from .ladder import Ladder, ladder, ladder_total, ladder_integral, weighted_y_rule
from .norms import NormSpec, NormQuadrature, DEFAULT_QUADRATURE, VertexInterval, \
    weighted_norm, region_norms, row_exponents, compact_form_ratio
from .fit import GammaFit, DataClass, fit_gamma, envelope, rows_above, analytic_data_classifier
from .cutoff import SmoothCutoff, smooth_cutoff, C_ZETA
from .inequalities import BallQuadrature, CaccioppoliReport, caccioppoli_interior_check, \
    caccioppoli_boundary_check, caccioppoli_high_order, tubular_bound_check, hardy_check, \
    localization_check
from .report import ReportRow, RegularityReport, regularity_table, fit_key, DEFAULT_EPSILONS, \
    REPORT_COLUMNS
