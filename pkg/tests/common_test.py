# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

import math

import numpy as np
import pytest
import yaml

from fraclap.common.artifacts import ArtifactHeader, config_hash, fmt_float, read_body, \
    read_header, write_csv, write_json
from fraclap.common.ordereddict_logger import OrderedDictLogger
from fraclap.common.parallel import ParallelSettings, ordered_map


def _slow_square(x:int)->int:
    return x*x

def test_ordered_map_keeps_input_order():
    items = list(range(25))
    expected = [x*x for x in items]
    assert ordered_map(_slow_square, items, ParallelSettings(threads=1)) == expected
    assert ordered_map(_slow_square, items, ParallelSettings(threads=4)) == expected
    assert ordered_map(_slow_square, [], ParallelSettings(threads=4)) == []

def test_logger_tree(tmp_path):
    filepath = str(tmp_path/'log.yaml')
    logger = OrderedDictLogger(filepath, None, save_delay=None)
    logger.info({'s': np.float64(0.5), 'n': np.int64(8)})
    with logger.pushd('verify', 'x0'):
        logger.info({'gamma': 1.5, 'rows': np.arange(3)})
        assert 'gamma' in logger and len(logger) == 2
        with pytest.raises(KeyError):
            logger.info({'gamma': 2.0})
        logger.info({'gamma': 2.0}, exists_ok=True)
    with pytest.raises(RuntimeError):
        logger.popd()
    logger.close()

    with open(filepath, 'r') as f:
        tree = yaml.safe_load(f)
    assert tree == {'s': 0.5, 'n': 8, 'verify': {'x0': {'gamma': 2.0, 'rows': [0, 1, 2]}}}

def test_empty_sections_are_not_created(tmp_path):
    filepath = str(tmp_path/'log.yaml')
    logger = OrderedDictLogger(filepath, None, save_delay=None)
    with logger.pushd('unused'):
        pass
    logger.info({'done': True})
    logger.close()
    with open(filepath, 'r') as f:
        assert yaml.safe_load(f) == {'done': True}

def test_float_format():
    assert fmt_float(0.1) == '0.10000000000000001'
    assert fmt_float(math.inf) == 'inf' and fmt_float(-math.inf) == '-inf'
    assert fmt_float(math.nan) == 'nan'
    assert fmt_float(np.int32(3)) == '3' and fmt_float(True) == 'True'
    assert fmt_float(None) == ''

def test_config_hash_is_canonical():
    a = config_hash({'b': 1, 'a': {'y': 2.0, 'x': [1, 2]}})
    b = config_hash({'a': {'x': (1, 2), 'y': np.float64(2.0)}, 'b': np.int64(1)})
    assert a == b and len(a) == 16
    assert config_hash({'b': 2}) != config_hash({'b': 1})

def test_headers(tmp_path):
    header = ArtifactHeader(config_hash='0123456789abcdef', seed=3)
    csv_path = write_csv(str(tmp_path/'t.csv'), header, ['p', 'norm'],
                         [(0, 1.0), (1, math.inf)])
    assert read_header(csv_path) == {'fraclap': header.version,
                                     'config_hash': '0123456789abcdef', 'seed': '3'}
    assert read_body(csv_path) == ['p,norm', '0,1', '1,inf']

    json_path = write_json(str(tmp_path/'t.json'), header, {'gamma': math.inf,
                                                            'rows': np.zeros(2)})
    assert read_header(json_path)['seed'] == 3
