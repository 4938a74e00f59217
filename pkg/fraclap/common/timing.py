# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Named wall-clock statistics for assembly, solves and certifications,
summarized in the structured log when the process exits."""

import gc
import logging
import threading
import timeit
from contextlib import ContextDecorator
from functools import wraps
from typing import Dict, Optional

from runstats import Statistics

_stats:Dict[str, Statistics] = {}
# ordered_map may time the same name from several threads
_lock = threading.Lock()


def add_timing(name:str, elapsed:float, no_print=True)->Statistics:
    with _lock:
        stats = _stats.setdefault(name, Statistics())
        stats.push(elapsed)
    if not no_print:
        logging.info(f'timing "{name}": {elapsed:.4g}s')
    return stats

def get_all_timings()->Dict[str, Statistics]:
    return _stats

def timing_summary(name:str)->Dict[str, float]:
    stats = _stats[name]
    count = len(stats)
    return {'count': count, 'total': stats.mean()*count, 'avg': stats.mean(),
            'stddev': stats.stddev() if count > 1 else float('nan'),
            'min': stats.minimum(), 'max': stats.maximum()}

def all_timing_summaries()->Dict[str, Dict[str, float]]:
    return {name: timing_summary(name) for name in sorted(_stats.keys())}

def print_all_timings()->None:
    for name, s in all_timing_summaries().items():
        logging.info(f'timing_name="{name}", avg={s["avg"]:.4g} count={s["count"]} '
                     f'stddev={s["stddev"]:.4g} min={s["min"]:.4g} max={s["max"]:.4g}')

def clear_timings()->None:
    with _lock:
        _stats.clear()


class MeasureBlockTime(ContextDecorator):
    """Times a block (or, used as decorator, every call) into the named statistics."""
    def __init__(self, name:str, no_print=True, disable_gc=False):
        self.name = name
        self.no_print = no_print
        self.disable_gc = disable_gc
        self.elapsed = 0.0

    def __enter__(self)->'MeasureBlockTime':
        self._gc_was_enabled = gc.isenabled()
        if self.disable_gc:
            gc.disable()
        self._start = timeit.default_timer()
        return self

    def __exit__(self, ty, val, tb)->bool:
        self.elapsed = timeit.default_timer() - self._start
        if self.disable_gc and self._gc_was_enabled:
            gc.enable()
        add_timing(self.name, self.elapsed, no_print=self.no_print)
        return False

def MeasureTime(f_py=None, no_print=True, disable_gc=False, name:Optional[str]=None):
    """Decorator form, usable bare (`@MeasureTime`) or with arguments."""
    def _decorator(f):
        @wraps(f)
        def _wrapper(*args, **kwargs):
            with MeasureBlockTime(name or f.__qualname__, no_print=no_print,
                                  disable_gc=disable_gc):
                return f(*args, **kwargs)
        return _wrapper
    return _decorator(f_py) if callable(f_py) else _decorator
