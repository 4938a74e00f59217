# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

from .mesh import graded_mesh, uniform_mesh, default_grading
from .solver import DiscreteSolution, solve_dirichlet_1d, galerkin_defect
from .norms import error_norms, convergence_study
