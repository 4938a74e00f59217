# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Ordered parallel map for ensembles and report rows.

Results always come back in input order, so anything reduced from them is
independent of the worker count.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, List, Optional

import psutil
from tqdm import tqdm


class ParallelSettings:
    def __init__(self, threads:Optional[int]=None, ray_enabled=False,
                 ray_local_mode=False, progress=False) -> None:
        self.threads = threads if threads else default_threads()
        self.ray_enabled = ray_enabled
        self.ray_local_mode = ray_local_mode
        self.progress = progress

    @staticmethod
    def from_conf(conf_common) -> 'ParallelSettings':
        # region conf vars
        threads = conf_common.get_val('threads', None)
        conf_ray = conf_common.get_val('ray', {})
        ray_enabled = bool(conf_ray.get('enabled', False))
        ray_local_mode = bool(conf_ray.get('local_mode', False))
        progress = bool(conf_common.get_val('progress', False))
        # endregion
        return ParallelSettings(threads, ray_enabled, ray_local_mode, progress)


_settings = ParallelSettings(threads=1)

def set_settings(settings:ParallelSettings)->None:
    global _settings
    _settings = settings

def get_settings()->ParallelSettings:
    return _settings

def default_threads()->int:
    return psutil.cpu_count(logical=False) or 1

def _init_ray(local_mode:bool)->None:
    import ray
    if not ray.is_initialized():
        ray.init(local_mode=local_mode, include_dashboard=False)

def ordered_map(fn:Callable[[Any], Any], items:Iterable[Any],
                settings:Optional[ParallelSettings]=None,
                desc:Optional[str]=None)->List[Any]:
    settings = settings or _settings
    items = list(items)
    if not items:
        return []

    if settings.ray_enabled:
        import ray
        _init_ray(settings.ray_local_mode)
        remote_fn = ray.remote(fn)
        refs = [remote_fn.remote(item) for item in items]
        return ray.get(refs) # ray.get preserves ref order

    if settings.threads <= 1 or len(items) == 1:
        it = tqdm(items, desc=desc) if settings.progress else items
        return [fn(item) for item in it]

    with ThreadPoolExecutor(max_workers=settings.threads) as pool:
        results = pool.map(fn, items)
        if settings.progress:
            results = tqdm(results, total=len(items), desc=desc)
        return list(results)
