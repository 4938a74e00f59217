# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Redirect resolution for loaded configs.

Two commands are understood. A mapping holding `_copy: /some/path` receives
every key of the mapping at that path that it doesn't define itself
(recursively). A scalar value written as `'_copy: /some/path'` is replaced by
the value at that path. Paths are '/'-separated, absolute or relative to the
node holding the command, and may use '..'.
"""

from collections.abc import Mapping, MutableMapping
from typing import Any, List, Optional, Set

from .errors import ConfigError


_PREFIX_NODE = '_copy'
_PREFIX_PATH = '_copy:'


def resolve_all(root_d:MutableMapping)->None:
    _Resolver(root_d).resolve_node(root_d, '/')


def is_proper_path(path:str)->bool:
    return path.startswith('/') and (len(path)==1 or not path.endswith('/'))


def join_path(parent:str, child:str)->str:
    parts = [p for p in parent.split('/') + child.split('/') if p]
    return '/' + '/'.join(parts)


def abs_path(cwd:str, rel_path:str)->str:
    """Absolute path for `rel_path` seen from node `cwd`, for example
    cwd='/a/b/c', rel_path='../d' gives '/a/b/d'."""
    if not is_proper_path(cwd):
        raise ConfigError(f'"{cwd}" is not an absolute config path')
    parts = [] if rel_path.startswith('/') else [p for p in cwd.split('/') if p]
    for part in rel_path.split('/'):
        part = part.strip()
        if not part or part == '.':
            continue
        if part == '..':
            if not parts:
                raise ConfigError(f'path "{rel_path}" climbs above root from "{cwd}"')
            parts.pop()
        else:
            parts.append(part)
    return '/' + '/'.join(parts)


def _redirect(v:Any)->Optional[str]:
    if isinstance(v, str) and v.startswith(_PREFIX_PATH):
        return v[len(_PREFIX_PATH):].strip()
    return None


def _merge_missing(source:Mapping, dest:MutableMapping)->None:
    for k, sv in source.items():
        if k not in dest:
            dest[k] = sv
        elif isinstance(sv, Mapping) and isinstance(dest[k], MutableMapping):
            _merge_missing(sv, dest[k])


class _Resolver:
    def __init__(self, root:MutableMapping) -> None:
        self.root = root
        self.visited:Set[str] = set()
        self.active:List[str] = []

    def resolve_node(self, node:MutableMapping, path:str)->None:
        if path in self.visited:
            return
        self.visited.add(path)

        source_path = node.get(_PREFIX_NODE, None)
        if isinstance(source_path, str):
            source = self.lookup(abs_path(path, source_path))
            if not isinstance(source, Mapping):
                raise ConfigError(f'"{_PREFIX_NODE}: {source_path}" at "{path}" must point to a mapping, got {source!r}')
            _merge_missing(source, node)
            del node[_PREFIX_NODE]

        for k in list(node.keys()):
            child_path = join_path(path, str(k))
            target = _redirect(node[k])
            if target is not None:
                node[k] = self.lookup(abs_path(child_path, target))
            if isinstance(node[k], MutableMapping):
                self.resolve_node(node[k], child_path)

    def lookup(self, path:str)->Any:
        if path in self.active:
            raise ConfigError(f'circular config reference through "{path}"')
        self.active.append(path)
        try:
            cur, cur_path = self.root, '/'
            for part in [p for p in path.split('/') if p]:
                if not isinstance(cur, MutableMapping):
                    raise ConfigError(f'cannot resolve "{path}": "{cur_path}" is not a mapping')
                self.resolve_node(cur, cur_path)
                if part not in cur:
                    raise ConfigError(f'cannot resolve "{path}": key "{part}" missing at "{cur_path}"')
                cur, cur_path = cur[part], join_path(cur_path, part)
            target = _redirect(cur)
            if target is not None:
                cur = self.lookup(abs_path(cur_path, target))
            return cur
        finally:
            self.active.pop()
