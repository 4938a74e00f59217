# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

import copy
import os
from collections import UserDict
from collections.abc import Mapping, MutableMapping
from typing import Any, Callable, List, Optional, Sequence

import yaml

from . import yaml_utils
from .errors import ConfigError


# global config instance
_config:Optional['Config'] = None

_TRUE_STRS = ('y', 'yes', 't', 'true', 'on', '1')
_FALSE_STRS = ('n', 'no', 'f', 'false', 'off', '0')

INCLUDE_KEY = '__include__'


def _to_bool(val:Any)->bool:
    if isinstance(val, bool):
        return val
    sval = str(val).strip().lower()
    if sval in _TRUE_STRS:
        return True
    if sval in _FALSE_STRS:
        return False
    raise ValueError(f'cannot interpret "{val}" as bool')

def _coerce(original:Any, val:Any)->Any:
    """Override value converted to the type of the value it replaces."""
    if isinstance(original, bool):
        return _to_bool(val)
    if original is None or isinstance(original, (list, Mapping)):
        # untyped or structured leaf, the override is a yaml literal
        return yaml.safe_load(val) if isinstance(val, str) else val
    return type(original)(val)

def deep_update(d:MutableMapping, u:Mapping, create_map:Callable[[],MutableMapping])\
        ->MutableMapping:
    for k, v in u.items():
        if isinstance(v, Mapping):
            cur = d.get(k, None)
            d[k] = deep_update(cur if isinstance(cur, MutableMapping) else create_map(), v, create_map)
        else:
            d[k] = v
    return d

def _section()->'Config':
    return Config(resolve_redirects=False)


class Config(UserDict):
    def __init__(self, config_filepath:Optional[str]=None,
                 param_args:Sequence=(), resolve_redirects=True) -> None:
        """Hierarchical key-value config loaded from yaml (or json) files.

        `config_filepath` may hold several files separated by ';', later files
        override earlier ones. A file may name defaults to load first with the
        special key '__include__' (a relative path or a list of them). After
        loading, `param_args` of the form ['--a.b.c', val, ...] override leaf
        values; the override is coerced to the type of the existing value and
        args that are not config paths are skipped.
        """
        super().__init__()
        self.loaded_files:List[str] = []

        if config_filepath:
            for filepath in config_filepath.strip().split(';'):
                if filepath.strip():
                    self._load_from_file(filepath.strip())

        # overrides may target keys that only exist after _copy resolution
        if param_args:
            resolved = copy.deepcopy(self)
            if resolve_redirects:
                yaml_utils.resolve_all(resolved)
            self._apply_overrides(param_args, resolved)

        if resolve_redirects:
            yaml_utils.resolve_all(self)
        self.config_filepath = config_filepath

    def _load_from_file(self, filepath:str)->None:
        filepath = os.path.abspath(os.path.expanduser(os.path.expandvars(filepath)))
        if not os.path.isfile(filepath):
            raise ConfigError(f'config file "{filepath}" does not exist')
        try:
            with open(filepath, 'r') as f:
                doc = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f'config file "{filepath}" is malformed: {e}') from e
        if doc is None:
            doc = {}
        if not isinstance(doc, Mapping):
            raise ConfigError(f'config file "{filepath}" must hold a mapping at top level')

        includes = doc.get(INCLUDE_KEY, [])
        if isinstance(includes, str):
            includes = [includes]
        if not isinstance(includes, list):
            raise ConfigError(f'"{INCLUDE_KEY}" in "{filepath}" must be a string or a list')
        for include in includes:
            self._load_from_file(os.path.join(os.path.dirname(filepath), include))

        deep_update(self, {k: v for k, v in doc.items() if k != INCLUDE_KEY}, _section)
        self.loaded_files.append(filepath)

    def _apply_overrides(self, args:Sequence, resolved:'Config')->None:
        i = 0
        while i < len(args)-1:
            if str(args[i]).startswith('--'):
                path = args[i][2:].split('.')
                i += 2 if self._override(path, args[i+1], resolved) else 1
            else:
                i += 1

    def _override(self, path:List[str], val:Any, resolved:'Config')->bool:
        section:MutableMapping = self
        for key in path[:-1]:
            if not isinstance(resolved, Mapping) or key not in resolved:
                return False
            resolved = resolved[key]
            if key not in section:
                section[key] = _section()
            section = section[key]

        key = path[-1]
        if not isinstance(resolved, Mapping) or key not in resolved:
            return False
        original = resolved[key]
        try:
            section[key] = _coerce(original, val)
        except Exception as e:
            raise ConfigError(
                f'cannot set key "{".".join(path)}" to value "{val}", '
                f'existing value is {original!r} of type {type(original).__name__}: {e}') from e
        return True

    def to_dict(self)->dict:
        return deep_update({}, self, dict) # type: ignore

    def get_val(self, key, default_val):
        return super().get(key, default_val)

    @staticmethod
    def set_inst(instance:'Config')->None:
        global _config
        _config = instance

    @staticmethod
    def get_inst()->'Config':
        if _config is None:
            raise ConfigError('no config has been initialized for this run')
        return _config
