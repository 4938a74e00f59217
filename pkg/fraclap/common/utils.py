# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

import logging
import multiprocessing
import os
from typing import Any, Optional, Sequence

import numpy as np

# set once by the process that imports fraclap first, workers inherit it
_MAIN_PID_ENV = 'fraclap_main_pid'
os.environ.setdefault(_MAIN_PID_ENV, str(os.getpid()))


def full_path(path:str, create=False)->str:
    assert path
    path = os.path.abspath(os.path.expanduser(os.path.expandvars(path)))
    if create:
        os.makedirs(path, exist_ok=True)
    return path

def create_logger(filepath:Optional[str]=None, name:Optional[str]=None,
                  level=logging.INFO, enable_stdout=True)->logging.Logger:
    """Stdlib logger behind the structured logger, handlers are replaced on
    every call so repeated runs in one process do not duplicate lines."""
    logger = logging.getLogger(name=name)
    for handler in logger.handlers[:]:
        handler.close()
        logger.removeHandler(handler)
    logger.setLevel(level)
    logger.propagate = False

    handlers:list = []
    if enable_stdout:
        handlers.append((logging.StreamHandler(), logging.Formatter('%(asctime)s %(message)s', '%H:%M')))
    if filepath:
        handlers.append((logging.FileHandler(filename=full_path(filepath)),
                         logging.Formatter('[%(asctime)s][%(levelname)s] %(message)s')))
    for handler, formatter in handlers:
        handler.setLevel(level)
        handler.setFormatter(formatter)
        logger.addHandler(handler)
    return logger

def as_points(x:Any, dim:int)->np.ndarray:
    """Coerces a point or a batch of points to a float array of shape (n, dim)."""
    pts = np.asarray(x, dtype=float)
    if dim == 1:
        return pts.reshape(-1, 1)
    return np.atleast_2d(pts).reshape(-1, dim)

def loglog_slope(x:Sequence[float], y:Sequence[float])->float:
    """Least squares slope of log(y) against log(x)."""
    lx, ly = np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])

def make_rng(seed:Optional[int])->np.random.Generator:
    return np.random.default_rng(seed)

def is_main_process()->bool:
    """False in worker processes started by multiprocessing or ray."""
    return multiprocessing.current_process().name == 'MainProcess' \
        and os.environ[_MAIN_PID_ENV] == str(os.getpid())
