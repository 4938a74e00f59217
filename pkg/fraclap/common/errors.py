# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Exception hierarchy. Every error knows the process exit code the CLI maps it to."""

from typing import Any, Optional, Tuple


class FraclapError(Exception):
    exit_code = 1


class ConfigError(FraclapError):
    """Schema violation, malformed config file or unknown preset."""
    exit_code = 2


class DomainError(FraclapError, ValueError):
    """Argument outside the mathematical domain of an operation."""
    exit_code = 2


class ParameterError(DomainError):
    """Infeasible parameter; `feasible` holds the (low, high) range that would work."""
    def __init__(self, name:str, value:Any, feasible:Optional[Tuple[float, float]]=None,
                 msg:str='') -> None:
        self.name, self.value, self.feasible = name, value, feasible
        text = f'parameter {name}={value} is infeasible'
        if feasible is not None:
            text += f', feasible range is ({feasible[0]:.6g}, {feasible[1]:.6g})'
        if msg:
            text += f': {msg}'
        super().__init__(text)


class SolverError(FraclapError):
    exit_code = 3


class QuadratureToleranceError(FraclapError):
    exit_code = 4

    def __init__(self, msg:str, achieved:float, value:Optional[float]=None) -> None:
        self.achieved, self.value = achieved, value
        super().__init__(f'{msg} (achieved error estimate {achieved:.3g})')


class DivergenceError(FraclapError):
    """Divergent weighted integral; `row` names the offending report row."""
    exit_code = 5

    def __init__(self, msg:str, row:Any=None) -> None:
        self.row = row
        super().__init__(msg if row is None else f'{msg}: {row}')
