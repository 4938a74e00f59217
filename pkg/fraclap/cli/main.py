# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

import argparse
import os
import sys
from typing import List, Optional, Sequence, Type

from ..common.common import common_init, logger
from ..common.config import Config
from ..common.errors import ConfigError, FraclapError
from ..common.utils import full_path
from .run_config import RunConfig
from .runners import PipelineRunner, RUNNERS

PRESET_DIR_ENV = 'FRACLAP_PRESET_DIR'
PRESET_EXTS = ('.yaml', '.yml', '.json')


def confs_dir()->str:
    return os.path.join(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))),
                        'confs')

def base_config()->str:
    return os.path.join(confs_dir(), 'fraclap.yaml')

def preset_path(name:str)->str:
    """File of a named preset, looked up in $FRACLAP_PRESET_DIR or confs/presets."""
    preset_dir = os.environ.get(PRESET_DIR_ENV, '') or os.path.join(confs_dir(), 'presets')
    for ext in ('',) + PRESET_EXTS:
        filepath = os.path.join(full_path(preset_dir), name + ext)
        if os.path.isfile(filepath):
            return filepath
    raise ConfigError(f'preset "{name}" not found in {preset_dir}')

def create_parser()->argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='fraclap',
        description='Fractional Laplacian solver and weighted regularity verifier. '
                    'Any --section.key value pair after the options overrides the config.')
    parser.add_argument('command', choices=list(RUNNERS.keys()),
                        help='pipeline to run')
    parser.add_argument('--config', type=str, default=None,
                        help='config files in yaml or json format, separated by ;')
    parser.add_argument('--preset', type=str, default=None,
                        help='named preset merged over the base config, before --config files')
    parser.add_argument('--out', type=str, default=None,
                        help='output directory, defaults to common.logdir/common.experiment_name')
    parser.add_argument('--seed', type=int, default=None,
                        help='seed for every randomized step')
    parser.add_argument('--threads', type=int, default=None,
                        help='worker threads for ensembles, output does not depend on it')
    return parser

def create_run_conf(args:argparse.Namespace, extra_args:Sequence[str])->Config:
    filepaths = [base_config()]
    if args.preset:
        filepaths.append(preset_path(args.preset))
    if args.config:
        filepaths += [p for p in args.config.split(';') if p.strip()]

    param_args:List[str] = []
    if args.out is not None:
        param_args += ['--common.expdir', args.out]
    if args.seed is not None:
        param_args += ['--common.seed', str(args.seed)]
    if args.threads is not None:
        param_args += ['--common.threads', str(args.threads)]
    return Config(config_filepath=';'.join(filepaths), param_args=list(extra_args) + param_args)

def run(argv:Optional[Sequence[str]]=None)->int:
    """Runs one command and returns the process exit code; nothing is written
    when the config does not validate."""
    parser = create_parser()
    args, extra_args = parser.parse_known_args(argv)
    try:
        conf = create_run_conf(args, extra_args)
        run_conf = RunConfig(conf)
        common_init(conf=conf)
        runner_type:Type[PipelineRunner] = RUNNERS[args.command]
        runner_type(run_conf).run()
    except FraclapError as e:
        logger.warn({'error': type(e).__name__, 'message': str(e), 'exit_code': e.exit_code},
                    exists_ok=True)
        print(f'fraclap {args.command}: {type(e).__name__}: {e}', file=sys.stderr)
        return e.exit_code
    return 0

def main()->None:
    sys.exit(run())


if __name__ == '__main__':
    main()
