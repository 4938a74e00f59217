# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

from collections import OrderedDict
import itertools
import logging
import os
import time
from typing import Any, List, Mapping, Optional, Union

import numpy as np
import yaml

TItems = Union[Mapping, str]

# do not reference common or otherwise we will have circular deps

def _fmt(val:Any)->str:
    if isinstance(val, (float, np.floating)):
        return f'{float(val):.4g}'
    return str(val)

def _plain(val:Any)->Any:
    """Converts numpy scalars and arrays so the yaml dump stays readable."""
    if isinstance(val, np.generic):
        return val.item()
    if isinstance(val, np.ndarray):
        return val.tolist()
    if isinstance(val, Mapping):
        return OrderedDict((str(k), _plain(v)) for k, v in val.items())
    if isinstance(val, (list, tuple)):
        return [_plain(v) for v in val]
    return val

def _represent_od(dumper:yaml.Dumper, data:OrderedDict):
    return dumper.represent_mapping('tag:yaml.org,2002:map', data.items())

yaml.add_representer(OrderedDict, _represent_od)


class OrderedDictLogger:
    """Structured logger that stores key/value records in a tree of ordered dicts.

    Each `info({...})` call writes its items into the current node and forwards a
    one-line rendering to an optional stdlib logger. `pushd(*keys)` makes a child
    node current (created lazily on first write) and `popd()` returns to the node
    that was current before the matching pushd. The tree is dumped as yaml on
    `save()`, periodically, and on `close()`.
    """
    def __init__(self, filepath:Optional[str], logger:Optional[logging.Logger],
                 save_delay:Optional[float]=30.0, yaml_log=True) -> None:
        super().__init__()
        self.reset(filepath, logger, save_delay, yaml_log=yaml_log)

    def reset(self, filepath:Optional[str], logger:Optional[logging.Logger],
              save_delay:Optional[float]=30.0, backup_existing_file=True,
              yaml_log=True) -> None:
        self._logger = logger
        self._yaml_log = yaml_log
        self._save_delay = save_delay
        self._call_count = 0
        self._last_save = time.time()
        self._filepath = filepath

        if self._yaml_log and filepath and os.path.exists(filepath) and backup_existing_file:
            stem, ext = os.path.splitext(filepath)
            os.replace(filepath, f'{stem}.{int(time.time())}{ext}')

        self._root_od:OrderedDict = OrderedDict()
        # one entry per pushd, node is None until something is written there
        self._paths:List[List[str]] = []
        self._nodes:List[Optional[OrderedDict]] = []

    def debug(self, dict:TItems, level:Optional[int]=logging.DEBUG, exists_ok=False)->None:
        self.info(dict, level, exists_ok)

    def warn(self, dict:TItems, level:Optional[int]=logging.WARN, exists_ok=False)->None:
        self.info(dict, level, exists_ok)

    def info(self, dict:TItems, level:Optional[int]=logging.INFO, exists_ok=False)->None:
        self._call_count += 1

        if isinstance(dict, Mapping):
            for k, v in dict.items():
                self._set(self._cur(), k, v, exists_ok)
            msg = ', '.join(f'{k}={_fmt(v)}' for k, v in dict.items())
        else:
            msg = dict
            key = '_warnings' if level==logging.WARN else '_messages'
            if self._yaml_log:
                node = self._root_od.setdefault(key, OrderedDict())
                node[str(self._call_count)] = msg

        if level is not None and self._logger:
            self._logger.log(msg=self.path() + ' ' + msg, level=level)

        if self._save_delay is not None and \
                time.time() - self._last_save > self._save_delay:
            self.save()
            self._last_save = time.time()

    def _set(self, node:Optional[OrderedDict], key:Any, val:Any, exists_ok:bool)->None:
        if node is None:
            return
        if not exists_ok and str(key) in node:
            raise KeyError(f'Key "{key}" already exists in log at path "{self.path()}" with value "{node[str(key)]}"')
        node[str(key)] = _plain(val)

    def _cur(self)->Optional[OrderedDict]:
        if not self._yaml_log:
            return None
        parent = self._root_od
        for i, keys in enumerate(self._paths):
            if self._nodes[i] is None:
                node = parent
                for key in keys:
                    child = node.setdefault(key, OrderedDict())
                    if not isinstance(child, OrderedDict):
                        raise RuntimeError(f'The key "{key}" already holds a scalar value and cannot be used as a section')
                    node = child
                self._nodes[i] = node
            parent = self._nodes[i]
        return parent

    def save(self, filepath:Optional[str]=None)->None:
        filepath = filepath or self._filepath
        if filepath and self._yaml_log:
            with open(filepath, 'w') as f:
                yaml.dump(self._root_od, f)

    def close(self)->None:
        self.save()
        if self._logger:
            for h in self._logger.handlers:
                h.flush()

    def pushd(self, *keys:Any)->'OrderedDictLogger':
        """Creates new path as specified by the sequence of the keys"""
        self._paths.append([str(k) for k in keys])
        self._nodes.append(None)
        return self

    def popd(self)->None:
        if not self._paths:
            raise RuntimeError('There is no child logger, popd() call is invalid')
        self._paths.pop()
        self._nodes.pop()

    def path(self)->str:
        return '/'.join(itertools.chain.from_iterable(self._paths))

    def root(self)->OrderedDict:
        return self._root_od

    def __enter__(self)->'OrderedDictLogger':
        return self
    def __exit__(self, type, value, traceback):
        self.popd()

    def __contains__(self, key:Any):
        cur = self._cur()
        return cur is not None and str(key) in cur

    def __len__(self)->int:
        cur = self._cur()
        return 0 if cur is None else len(cur)
