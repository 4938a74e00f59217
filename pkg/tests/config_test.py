# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

import math
import os

import pytest
import yaml

from fraclap.cli.run_config import RunConfig
from fraclap.common.config import Config
from fraclap.common.errors import ConfigError
from fraclap.diagnostics import NormQuadrature

BASE = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'confs', 'fraclap.yaml')
PRESETS = os.path.join(os.path.dirname(BASE), 'presets')


def test_param_override():
    conf = Config(BASE)
    assert conf['problem']['s'] == 0.5
    assert conf['diagnostics']['strict']

    conf = Config(BASE, param_args=['--problem.s', '0.3', '--diagnostics.strict', 'False',
                                    '--diagnostics.p_range', '[0, 2, 4]', '--common.seed', '5'])
    assert conf['problem']['s'] == 0.3
    assert not conf['diagnostics']['strict']
    assert conf['diagnostics']['p_range'] == [0, 2, 4]
    assert conf['common']['seed'] == 5 and isinstance(conf['common']['seed'], int)

def test_later_files_override(tmp_path):
    extra = tmp_path/'extra.yaml'
    extra.write_text('problem:\n  s: 0.25\n  F:\n    type: zero\n')
    conf = Config(f'{BASE};{extra}')
    assert conf['problem']['s'] == 0.25
    assert conf['problem']['F']['type'] == 'zero'
    assert conf['problem']['f']['type'] == 'constant'

def test_include(tmp_path):
    child = tmp_path/'child.yaml'
    child.write_text(f'__include__: "{BASE}"\ncommon:\n  seed: 3\n')
    conf = Config(str(child))
    assert conf['common']['seed'] == 3
    assert conf['discretization']['n'] == 64
    assert '__include__' not in conf

def test_json_preset_over_base():
    conf = Config(f'{BASE};{os.path.join(PRESETS, "xs-vertex.json")}')
    assert conf['diagnostics']['analytic']['type'] == 'power'
    assert conf['problem']['f'] is None

def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError):
        Config(str(tmp_path/'nope.yaml'))
    bad = tmp_path/'bad.yaml'
    bad.write_text('problem: [1, 2\n')
    with pytest.raises(ConfigError):
        Config(str(bad))
    scalar = tmp_path/'scalar.yaml'
    scalar.write_text('42\n')
    with pytest.raises(ConfigError):
        Config(str(scalar))

def test_serialize():
    conf = Config()
    conf['s'] = 0.5
    s = yaml.dump(conf)
    conf2 = yaml.load(s, Loader=yaml.Loader)
    assert len(conf2)==1

def test_run_config_defaults():
    rc = RunConfig(Config(BASE))
    assert rc.d == 1 and rc.domain == (-1.0, 1.0)
    assert rc.grading == 2.0
    assert rc.vertex_length == 0.5
    assert rc.vertices == [-1.0, 1.0]
    assert rc.quadrature == NormQuadrature(n_panels=30, n_gauss=8, n_angle=24,
                                           n_angle_panels=24, n_interior=4096)
    assert rc.cover_params['vertex']['c_tilde'] == pytest.approx(0.095)
    assert rc.normalized['discretization']['grading'] == 2.0
    assert len(rc.config_hash) == 16

def test_run_config_hash():
    a = RunConfig(Config(BASE))
    b = RunConfig(Config(BASE, param_args=['--common.threads', '4', '--common.progress', 'True']))
    c = RunConfig(Config(BASE, param_args=['--problem.s', '0.4']))
    # execution settings do not change the artifacts
    assert a.config_hash == b.config_hash
    assert a.config_hash != c.config_hash

def test_run_config_polygon():
    rc = RunConfig(Config(f'{BASE};{os.path.join(PRESETS, "sector.json")}'))
    assert rc.d == 2 and rc.params.d == 2
    assert math.isclose(rc.polygon().diameter, 2*math.sin(3*math.pi/8))
    with pytest.raises(ConfigError):
        rc.interval()

@pytest.mark.parametrize('override', [
    ['--problem.domain.kind', 'disk'],
    ['--problem.domain.interval', '[1.0, -1.0]'],
    ['--discretization.n', '1'],
    ['--extension.shift_t', '[0.0, 0.5]'],
    ['--diagnostics.field', 'galerkin'],
    ['--diagnostics.checks', '[hardy, taylor]'],
    ['--diagnostics.eps_set', '[]'],
    ['--diagnostics.quadrature.n_gauss', '0'],
    ['--covering.vertex.c_hat', '0.05'],
    ['--problem.f.type', 'spline'],
])
def test_run_config_rejects(override):
    with pytest.raises(ConfigError):
        RunConfig(Config(BASE, param_args=override))

def test_run_config_check_domains():
    sector = os.path.join(PRESETS, 'sector.json')
    with pytest.raises(ConfigError):
        RunConfig(Config(f'{BASE};{sector}', param_args=['--diagnostics.field', 'solution']))
    with pytest.raises(ConfigError):
        RunConfig(Config(f'{BASE};{sector}', param_args=['--diagnostics.checks', '[tubular]']))
    with pytest.raises(ConfigError):
        RunConfig(Config(BASE, param_args=['--problem.reference', 'none',
                                           '--diagnostics.checks', '[localization]',
                                           '--problem.f.type', '']))
