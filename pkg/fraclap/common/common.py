# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Process wide state of a run: the config, the output directory and the
structured logger every module logs through."""

import atexit
import datetime
import os
import sys
from typing import Optional

import yaml
from send2trash import send2trash

from fraclap import __version__
from .config import Config
from . import utils, timing
from .errors import ConfigError
from .ordereddict_logger import OrderedDictLogger

logger = OrderedDictLogger(None, None, yaml_log=False)
_atexit_reg = False


def get_conf(conf:Optional[Config]=None)->Config:
    return conf if conf is not None else Config.get_inst()

def get_conf_common(conf:Optional[Config]=None)->Config:
    return get_conf(conf)['common']

def get_expdir(conf:Optional[Config]=None)->str:
    return get_conf_common(conf)['expdir']

def on_app_exit()->None:
    if timing.get_all_timings():
        logger.info({'timings': timing.all_timing_summaries()}, exists_ok=True)
        timing.print_all_timings()
    logger.close()

def common_init(conf:Config)->Config:
    """Makes `conf` the global config, creates the output directory and the
    logger and dumps the config used. The cli calls this only after the run
    config validated, so a rejected config leaves no directory behind."""
    if not utils.is_main_process():
        raise RuntimeError('common_init should not be called from child process')
    if 'common' not in conf:
        raise ConfigError('config has no "common" section')

    resolve_expdir(conf)
    Config.set_inst(conf)

    # region conf vars
    clean_expdir = bool(get_conf_common(conf).get_val('clean_expdir', False))
    # endregion
    ensure_expdir(conf, clean=clean_expdir)
    create_logger(conf)
    _dump_conf(conf)

    global _atexit_reg
    if not _atexit_reg:
        atexit.register(on_app_exit)
        _atexit_reg = True
    return conf

def resolve_expdir(conf:Config)->str:
    """An explicit common.expdir wins, otherwise logdir/experiment_name."""
    conf_common = get_conf_common(conf)

    # region conf vars
    experiment_name = conf_common['experiment_name']
    logdir = conf_common['logdir']
    expdir = conf_common.get_val('expdir', None)
    # endregion

    if expdir:
        expdir = utils.full_path(expdir)
    elif logdir:
        expdir = os.path.join(utils.full_path(logdir), experiment_name)
    else:
        raise ConfigError('either common.logdir or an output directory must be specified')

    conf_common['expdir'] = expdir
    return expdir

def ensure_expdir(conf:Config, clean:bool)->str:
    expdir = get_expdir(conf)
    if clean and os.path.exists(expdir):
        send2trash(expdir)
    os.makedirs(expdir, exist_ok=True)
    return expdir

def _dump_conf(conf:Config)->None:
    with open(os.path.join(get_expdir(conf), 'config_used.yaml'), 'w') as f:
        yaml.safe_dump(conf.to_dict(), f)

def create_logger(conf:Config)->OrderedDictLogger:
    logger.close()

    conf_common = get_conf_common(conf)
    # region conf vars
    expdir = conf_common['expdir']
    experiment_name = conf_common['experiment_name']
    log_prefix = conf_common['log_prefix']
    yaml_log = conf_common['yaml_log']
    log_level = conf_common['log_level']
    # endregion

    sys_log_filepath = os.path.join(expdir, f'{log_prefix}.log')
    logs_yaml_filepath = os.path.join(expdir, f'{log_prefix}.yaml')
    sys_logger = utils.create_logger(filepath=sys_log_filepath, name=experiment_name,
                                     level=log_level, enable_stdout=True)

    logger.reset(logs_yaml_filepath, sys_logger, yaml_log=yaml_log,
                 backup_existing_file=False)
    logger.info({'command_line': ' '.join(sys.argv), 'version': __version__})
    logger.info({'experiment_name': experiment_name, 'datetime': str(datetime.datetime.now()),
                 'pid': os.getpid(), 'expdir': expdir})
    return logger
