# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Output files. Each starts with version, config hash and seed header lines and
formats floats with 17 significant digits, so identical runs give identical bytes."""

import csv
import hashlib
import json
import os
from dataclasses import dataclass
from typing import Any, Iterable, List, Mapping, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from fraclap import __version__


def config_hash(d:Mapping)->str:
    canonical = json.dumps(_plain(d), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()[:16]

@dataclass(frozen=True)
class ArtifactHeader:
    config_hash: str
    seed: int
    version: str = __version__

    def lines(self)->List[str]:
        return [f'# fraclap {self.version}', f'# config_hash {self.config_hash}',
                f'# seed {self.seed}']

    def as_dict(self)->dict:
        return {'tool': 'fraclap', 'version': self.version,
                'config_hash': self.config_hash, 'seed': self.seed}

def fmt_float(val:Any)->str:
    if isinstance(val, (bool, np.bool_)):
        return str(bool(val))
    if isinstance(val, (int, np.integer)):
        return str(int(val))
    if isinstance(val, (float, np.floating)):
        v = float(val)
        if np.isnan(v):
            return 'nan'
        if np.isinf(v):
            return 'inf' if v > 0 else '-inf'
        return '%.17g' % v
    if val is None:
        return ''
    return str(val)

def _plain(val:Any)->Any:
    if isinstance(val, np.generic):
        return val.item()
    if isinstance(val, np.ndarray):
        return [_plain(v) for v in val.tolist()]
    if isinstance(val, Mapping):
        return {str(k): _plain(v) for k, v in val.items()}
    if isinstance(val, (list, tuple)):
        return [_plain(v) for v in val]
    if isinstance(val, float) and not np.isfinite(val):
        return fmt_float(val)
    return val

def write_csv(filepath:str, header:ArtifactHeader, columns:Sequence[str],
              rows:Iterable[Sequence[Any]])->str:
    os.makedirs(os.path.dirname(os.path.abspath(filepath)), exist_ok=True)
    with open(filepath, 'w', newline='') as f:
        for line in header.lines():
            f.write(line + '\n')
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt_float(v) for v in row])
    return filepath

def write_json(filepath:str, header:ArtifactHeader, payload:Mapping)->str:
    os.makedirs(os.path.dirname(os.path.abspath(filepath)), exist_ok=True)
    doc = {'header': header.as_dict()}
    doc.update(_plain(payload))
    with open(filepath, 'w') as f:
        json.dump(doc, f, indent=2)
        f.write('\n')
    return filepath

def write_coo(filepath:str, header:ArtifactHeader, matrix:Any)->str:
    """Coordinate-format text: one `i j value` line per stored entry."""
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    os.makedirs(os.path.dirname(os.path.abspath(filepath)), exist_ok=True)
    with open(filepath, 'w') as f:
        for line in header.lines():
            f.write(line + '\n')
        f.write(f'# shape {coo.shape[0]} {coo.shape[1]}\n')
        for k in order:
            f.write(f'{coo.row[k]} {coo.col[k]} {fmt_float(coo.data[k])}\n')
    return filepath

def read_body(filepath:str)->List[str]:
    """Lines after the header block."""
    with open(filepath, 'r') as f:
        return [line for line in f.read().splitlines() if not line.startswith('# ')]

def read_header(filepath:str)->Optional[dict]:
    if filepath.endswith('.json'):
        with open(filepath, 'r') as f:
            return json.load(f).get('header')
    out = {}
    with open(filepath, 'r') as f:
        for line in f:
            if not line.startswith('# '):
                break
            parts = line[2:].strip().split(' ', 1)
            if len(parts) == 2:
                out[parts[0]] = parts[1]
    return out
