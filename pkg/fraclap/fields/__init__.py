# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

from .scalar_field import ScalarField, CombinationField, ProductField, RestrictedField, \
    ANY_ORDER, scaled
from .analytic import ConstantField, PolynomialField, PowerField, ExpField, SineField, \
    GetoorField, SeparableField, BesselExtensionField, CornerField, bessel_profile, \
    falling_factorial
from .grid import GridField
from .factory import create_field, FIELD_TYPES
