# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

from collections.abc import Mapping
from typing import Any, Optional

from ..common.errors import ConfigError
from .analytic import BesselExtensionField, ConstantField, CornerField, ExpField, GetoorField, \
    PolynomialField, PowerField, SeparableField, SineField
from .scalar_field import CombinationField, ProductField, ScalarField


FIELD_TYPES = ('zero', 'constant', 'polynomial', 'power', 'exp', 'sine', 'getoor', 'separable',
               'product', 'sum', 'bessel_extension', 'corner')


def _get(conf_field:Mapping, key:str, default:Any=None)->Any:
    val = conf_field.get(key, default)
    return default if val is None else val

def create_field(conf_field:Optional[Mapping], dim:int)->Optional[ScalarField]:
    """Builds a field from a config section {type: ..., <args>}; None or an
    empty type gives None."""
    if conf_field is None:
        return None
    if not isinstance(conf_field, Mapping):
        raise ConfigError(f'a field spec must be a mapping, got {conf_field!r}')
    field_type = conf_field.get('type', None)
    if not field_type:
        return None
    axis = int(_get(conf_field, 'axis', 0))
    try:
        if field_type == 'zero':
            return ConstantField(0.0, dim)
        elif field_type == 'constant':
            return ConstantField(float(_get(conf_field, 'value', 1.0)), dim)
        elif field_type == 'polynomial':
            return PolynomialField(conf_field['coeffs'], dim, axis)
        elif field_type == 'power':
            return PowerField(float(conf_field['a']), float(_get(conf_field, 'vertex', 0.0)),
                              int(_get(conf_field, 'side', 1)), float(_get(conf_field, 'coeff', 1.0)),
                              dim, axis)
        elif field_type == 'exp':
            return ExpField(float(_get(conf_field, 'k', 1.0)), float(_get(conf_field, 'coeff', 1.0)),
                            dim, axis)
        elif field_type == 'sine':
            return SineField(float(_get(conf_field, 'k', 1.0)), float(_get(conf_field, 'phase', 0.0)),
                             float(_get(conf_field, 'coeff', 1.0)), dim, axis)
        elif field_type == 'getoor':
            return GetoorField(float(conf_field['s']), dim, float(_get(conf_field, 'radius', 1.0)),
                               conf_field.get('center', None))
        elif field_type == 'separable':
            factors = [create_field(c, 1) for c in conf_field['factors']]
            if len(factors) != dim:
                raise ConfigError(f'a separable field of dimension {dim} needs {dim} factors')
            return SeparableField(factors)
        elif field_type == 'product':
            return ProductField(create_field(conf_field['u'], dim), create_field(conf_field['v'], dim))
        elif field_type == 'sum':
            terms = [create_field(c, dim) for c in conf_field['terms']]
            coeffs = _get(conf_field, 'coeffs', [1.0]*len(terms))
            return CombinationField(terms, coeffs)
        elif field_type == 'bessel_extension':
            field = BesselExtensionField(float(conf_field['s']), conf_field['k'],
                                         float(_get(conf_field, 'phase', 0.0)),
                                         float(_get(conf_field, 'coeff', 1.0)))
            if field.dim != dim:
                raise ConfigError(f'bessel extension has dimension {field.dim}, expected {dim}')
            return field
        elif field_type == 'corner':
            if dim != 2:
                raise ConfigError('corner fields live in the plane')
            vertex = _get(conf_field, 'vertex', (0.0, 0.0))
            if 'theta' in conf_field:
                return CornerField.for_corner(float(conf_field['theta']), vertex,
                                              float(_get(conf_field, 'edge_angle', 0.0)),
                                              float(_get(conf_field, 'coeff', 1.0)))
            return CornerField(float(_get(conf_field, 'lam', 2.0/3.0)), vertex,
                               float(_get(conf_field, 'bisector', 0.0)),
                               float(_get(conf_field, 'phase', 0.0)),
                               float(_get(conf_field, 'coeff', 1.0)))
        else:
            raise ConfigError(f'invalid field type "{field_type}", expected one of {FIELD_TYPES}')
    except KeyError as e:
        raise ConfigError(f'field of type "{field_type}" is missing key {e}') from e
    except (TypeError, ValueError) as e:
        raise ConfigError(f'field of type "{field_type}" is malformed: {e}') from e

