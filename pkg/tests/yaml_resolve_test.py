# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

import pytest
import yaml

from fraclap.common import yaml_utils
from fraclap.common.errors import ConfigError


def _resolved(text:str)->dict:
    d = yaml.safe_load(text)
    yaml_utils.resolve_all(d)
    return d


def test_scalar_and_node_copies():
    d = _resolved("""
    problem:
        s: 0.3
        f:
            type: 'sine'
            k: 2.0
            phase:
                value: 0.0
    diagnostics:
        analytic:
            _copy: '/problem/f'
            k: 4.0
        s: '_copy: /problem/s'
        ladder:
            n_panels: 30
            n_gauss: '_copy: ../n_panels'
            parent_s: '_copy: ../../s'
    covering:
        s: '_copy: ./../../diagnostics/s'
    """)
    assert d['diagnostics']['analytic'] == {'type': 'sine', 'k': 4.0, 'phase': {'value': 0.0}}
    assert d['diagnostics']['s'] == 0.3
    assert d['diagnostics']['ladder'] == {'n_panels': 30, 'n_gauss': 30, 'parent_s': 0.3}
    assert d['covering']['s'] == 0.3

def test_copy_of_copy_merges_nested():
    d = _resolved("""
    common:
        quadrature:
            n_gauss: 8
            angle:
                n: 24
    verify:
        quadrature:
            _copy: '/common/quadrature'
            angle:
                panels: 12
    report:
        quadrature: '_copy: /verify/quadrature'
    """)
    expected = {'n_gauss': 8, 'angle': {'n': 24, 'panels': 12}}
    assert d['verify']['quadrature'] == expected
    assert d['report']['quadrature'] == expected
    # the source is left alone
    assert d['common']['quadrature'] == {'n_gauss': 8, 'angle': {'n': 24}}

def test_bad_redirects():
    with pytest.raises(ConfigError):
        _resolved("a: '_copy: /b'\nb: '_copy: /a'\n")
    with pytest.raises(ConfigError):
        _resolved("a: '_copy: /missing/key'\n")
    with pytest.raises(ConfigError):
        _resolved("a:\n  _copy: '/b'\nb: 3\n")
    with pytest.raises(ConfigError):
        _resolved("a: '_copy: ../../x'\n")

def test_paths():
    assert yaml_utils.abs_path('/a/b/c', '../d') == '/a/b/d'
    assert yaml_utils.abs_path('/a/b', '/x/y') == '/x/y'
    assert yaml_utils.join_path('/a', 'b') == '/a/b'
    assert yaml_utils.is_proper_path('/') and not yaml_utils.is_proper_path('a/b')
