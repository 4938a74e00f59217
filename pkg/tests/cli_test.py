# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

import csv
import json
import math
import os

import numpy as np
import pytest

from fraclap.cli.main import create_parser, create_run_conf, preset_path, run
from fraclap.common.artifacts import read_body, read_header
from fraclap.common.errors import ConfigError
from fraclap.fields import falling_factorial


def _json(path):
    with open(path, 'r') as f:
        return json.load(f)

def _table(path):
    return list(csv.DictReader(read_body(path)))


def test_solve_getoor(tmp_path):
    out = tmp_path/'getoor'
    assert run(['solve', '--preset', 'getoor', '--out', str(out)]) == 0
    assert (out/'solution.csv').exists() and (out/'summary.json').exists()
    summary = _json(out/'summary.json')
    assert summary['errors']['L2'] < 2e-2
    assert summary['residual'] < 1e-8
    rows = _table(out/'solution.csv')
    assert len(rows) == 201
    assert set(rows[0]) == {'x', 'u', 'u_ref', 'error'}
    assert abs(float(rows[100]['u_ref']) - 1.0) < 1e-12
    header = read_header(str(out/'solution.csv'))
    assert header['config_hash'] == summary['header']['config_hash']
    assert (out/'config_used.yaml').exists()

def test_solve_zero_data(tmp_path):
    assert run(['solve', '--preset', 'zero', '--out', str(tmp_path)]) == 0
    summary = _json(tmp_path/'summary.json')
    assert summary['energy'] == 0.0
    assert all(float(r['u']) == 0.0 for r in _table(tmp_path/'solution.csv'))

def test_solve_exports_matrix(tmp_path):
    assert run(['solve', '--preset', 'zero', '--out', str(tmp_path),
                '--discretization.export_matrix', 'True']) == 0
    with open(tmp_path/'stiffness.coo', 'r') as f:
        assert '# shape 15 15\n' in f.readlines()
    # the fractional stiffness matrix is dense
    assert len(read_body(str(tmp_path/'stiffness.coo'))) == 15*15

def test_malformed_config_writes_nothing(tmp_path):
    bad = tmp_path/'bad.json'
    bad.write_text('{"problem": {"s": 0.5,')
    out = tmp_path/'out'
    assert run(['solve', '--config', str(bad), '--out', str(out)]) == 2
    assert not out.exists()

def test_schema_violations(tmp_path):
    out = tmp_path/'out'
    assert run(['solve', '--preset', 'getoor', '--out', str(out), '--problem.s', '1.5']) == 2
    assert run(['solve', '--preset', 'getoor', '--out', str(out),
                '--discretization.degree', '0']) == 2
    assert run(['solve', '--preset', 'lshape', '--out', str(out),
                '--problem.reference', 'getoor']) == 2
    assert run(['verify', '--preset', 'xs-vertex', '--out', str(out),
                '--diagnostics.vertices', '[0.5]']) == 2
    assert not out.exists()

def test_unknown_preset(tmp_path):
    assert run(['solve', '--preset', 'no-such-preset', '--out', str(tmp_path/'out')]) == 2
    with pytest.raises(ConfigError):
        preset_path('no-such-preset')

def test_preset_dir_from_environment(tmp_path, monkeypatch):
    presets = tmp_path/'presets'
    presets.mkdir()
    (presets/'mine.json').write_text(json.dumps(
        {'problem': {'f': {'type': 'constant', 'value': 2.0}, 'reference': 'getoor'},
         'discretization': {'n': 16}}))
    monkeypatch.setenv('FRACLAP_PRESET_DIR', str(presets))
    assert preset_path('mine') == str(presets/'mine.json')
    out = tmp_path/'out'
    assert run(['solve', '--preset', 'mine', '--out', str(out)]) == 0
    rows = _table(out/'solution.csv')
    # u_ref scales with the data
    assert abs(float(rows[100]['u_ref']) - 2.0) < 1e-12

def test_preset_merges_between_base_and_config(tmp_path):
    override = tmp_path/'mine.yaml'
    override.write_text('discretization:\n  degree: 2\n')
    args, extra = create_parser().parse_known_args(
        ['solve', '--preset', 'getoor', '--config', str(override), '--problem.s', '0.25'])
    conf = create_run_conf(args, extra)
    assert conf['discretization']['n'] == 64
    assert conf['discretization']['degree'] == 2
    assert conf['problem']['s'] == 0.25
    # base keys the preset leaves alone survive
    assert 'covering' in conf
    assert preset_path('getoor').endswith('.json')

def test_solve_is_deterministic(tmp_path):
    a, b = tmp_path/'a', tmp_path/'b'
    assert run(['solve', '--preset', 'getoor', '--out', str(a), '--threads', '1']) == 0
    assert run(['solve', '--preset', 'getoor', '--out', str(b), '--threads', '2']) == 0
    for name in ('solution.csv', 'summary.json'):
        assert (a/name).read_bytes() == (b/name).read_bytes()

def test_seed_changes_header_hash(tmp_path):
    a, b = tmp_path/'a', tmp_path/'b'
    assert run(['solve', '--preset', 'zero', '--out', str(a)]) == 0
    assert run(['solve', '--preset', 'zero', '--out', str(b), '--seed', '7']) == 0
    ha, hb = read_header(str(a/'solution.csv')), read_header(str(b/'solution.csv'))
    assert ha['config_hash'] != hb['config_hash']
    assert read_body(str(a/'solution.csv')) == read_body(str(b/'solution.csv'))

def test_verify_power_rows(tmp_path):
    assert run(['verify', '--preset', 'xs-vertex', '--out', str(tmp_path)]) == 0
    rows = _table(tmp_path/'regularity.csv')
    assert len(rows) == 11*3
    for r in rows:
        p, eps = int(r['p']), float(r['epsilon'])
        expected = abs(falling_factorial(0.5, p))*math.sqrt(0.5**(2*eps)/(2*eps))
        assert np.isclose(float(r['norm']), expected, rtol=1e-8, atol=0.0)
    fits = _table(tmp_path/'regularity_fits.csv')
    assert {f['region'] for f in fits} == {'x0'}
    assert all(float(f['gamma']) >= 1.0 for f in fits)
    assert (tmp_path/'regularity.json').exists() and (tmp_path/'inequality_checks.json').exists()

def test_verify_divergent_row_exits(tmp_path):
    assert run(['verify', '--preset', 'xs-vertex-eps0', '--out', str(tmp_path)]) == 5
    assert not (tmp_path/'regularity.csv').exists()

def test_verify_non_strict_keeps_divergent_rows(tmp_path):
    assert run(['verify', '--preset', 'xs-vertex-eps0', '--out', str(tmp_path),
                '--diagnostics.strict', 'False']) == 0
    rows = _table(tmp_path/'regularity.csv')
    assert any(math.isinf(float(r['norm'])) for r in rows)
    doc = _json(tmp_path/'regularity.json')
    assert doc['metadata']['fit_refused'] == ['x0@0']

def test_verify_getoor_solution_with_checks(tmp_path):
    assert run(['verify', '--preset', 'getoor', '--out', str(tmp_path),
                '--diagnostics.checks', '[hardy, data_class]']) == 0
    doc = _json(tmp_path/'inequality_checks.json')
    assert set(doc['checks']) == {'hardy', 'data_class'}
    assert set(doc['checks']['hardy']) == {'x-1', 'x1-'}
    assert all(0.0 < h['ratio'] < math.inf for h in doc['checks']['hardy'].values())
    # constant data: only the zeroth sum is nonzero
    assert doc['checks']['data_class']['sums'][1] == 0.0
    regions = {r['region'] for r in _table(tmp_path/'regularity.csv')}
    assert regions == {'x-1', 'x1-'}

def test_extend_sine(tmp_path):
    assert run(['extend', '--preset', 'sinus-extension', '--out', str(tmp_path)]) == 0
    for name in ('extension_slices.csv', 'dtn.csv', 'extension.json'):
        assert (tmp_path/name).exists()
    doc = _json(tmp_path/'extension.json')
    assert doc['energy'] > 0.0
    # at s = 1/2 the flux recovers f itself
    assert doc['dtn_residual'] < 0.25
    assert doc['n_check']['apriori_ratio'] > 0.0
    assert doc['shift_probe']['finite']
    ys = {float(r['y']) for r in _table(tmp_path/'extension_slices.csv')}
    assert 0.0 in ys and len(ys) == 3

def test_cover_square(tmp_path):
    assert run(['cover', '--preset', 'square', '--out', str(tmp_path),
                '--covering.samples', '20000']) == 0
    certs = _json(tmp_path/'certificates.json')['coverings']
    assert len(certs) == 4 + 8 + 4
    for label, cert in certs.items():
        outer = cert.get('outer', cert)
        assert outer['coverage'] == 1.0, label
        assert outer['overlap_N'] >= 1
    edge_certs = [cert for cert in certs.values() if '1.5' in cert.get('delta_tail', {})]
    assert len(edge_certs) == 4
    for cert in edge_certs:
        assert not cert['delta_tail']['1.0']['converged']
        assert cert['delta_tail']['1.5']['converged']
    rows = _table(tmp_path/'coverings.csv')
    assert {'ball', 'half-ball'} <= {r['kind'] for r in rows}
    dec = _json(tmp_path/'decomposition.json')
    assert dec['header']['seed'] == 0

def test_cover_without_kinds_writes_empty_files(tmp_path):
    assert run(['cover', '--preset', 'square', '--out', str(tmp_path),
                '--covering.kinds', '[]']) == 0
    assert _table(tmp_path/'coverings.csv') == []
    assert _json(tmp_path/'certificates.json')['coverings'] == {}

def test_cover_rejects_bad_radii(tmp_path):
    out = tmp_path/'out'
    assert run(['cover', '--preset', 'square', '--out', str(out),
                '--covering.edge.c', '0.5']) == 2
    assert not out.exists()

def test_cover_needs_polygon(tmp_path):
    assert run(['cover', '--preset', 'getoor', '--out', str(tmp_path)]) == 2

def test_report_convergence(tmp_path):
    assert run(['report', '--preset', 'getoor', '--out', str(tmp_path),
                '--discretization.n_list', '[8, 16, 32]']) == 0
    rows = _table(tmp_path/'convergence.csv')
    assert [int(r['n']) for r in rows] == [8, 16, 32]
    errs = [float(r['L2']) for r in rows]
    assert errs[2] < errs[0]
    doc = _json(tmp_path/'report.json')
    assert 'convergence' in doc and 'fits' in doc
    assert os.path.exists(tmp_path/'regularity.csv')
