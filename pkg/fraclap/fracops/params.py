# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

import math
from dataclasses import dataclass, field

from scipy.special import gammaln

from ..common.errors import DomainError


def _check_s(s:float)->float:
    s = float(s)
    if not (0.0 < s < 1.0) or math.isnan(s):
        raise DomainError(f'fractional order s={s} must lie in the open interval (0, 1)')
    return s

def _check_d(d:int)->int:
    if d not in (1, 2):
        raise DomainError(f'dimension d={d} must be 1 or 2')
    return d

def kernel_constant(d:int, s:float)->float:
    """C(d, s) = -2^{2s} Γ(s+d/2) / (π^{d/2} Γ(-s)).

    Γ(-s) = -Γ(1-s)/s, so C = 2^{2s} s Γ(s+d/2) / (π^{d/2} Γ(1-s)) > 0, evaluated in
    log space.
    """
    s, d = _check_s(s), _check_d(d)
    log_c = 2*s*math.log(2.0) + math.log(s) + gammaln(s + d/2) \
        - (d/2)*math.log(math.pi) - gammaln(1.0 - s)
    return math.exp(log_c)

def dtn_constant(s:float)->float:
    """d_s = 2^{2s-1} Γ(s)/Γ(1-s)."""
    s = _check_s(s)
    return math.exp((2*s - 1)*math.log(2.0) + gammaln(s) - gammaln(1.0 - s))

def getoor_constant(d:int, s:float)->float:
    """(-Δ)^s (1-|x|²)_+^s = 2^{2s} Γ(1+s) Γ(s+d/2) / Γ(d/2) inside the unit ball."""
    s, d = _check_s(s), _check_d(d)
    return math.exp(2*s*math.log(2.0) + gammaln(1+s) + gammaln(s + d/2) - gammaln(d/2))


@dataclass(frozen=True)
class FractionalParams:
    s: float
    d: int = 1
    alpha: float = field(init=False)
    C_ds: float = field(init=False)
    d_s: float = field(init=False)

    def __post_init__(self)->None:
        s, d = _check_s(self.s), _check_d(self.d)
        object.__setattr__(self, 's', s)
        object.__setattr__(self, 'alpha', 1.0 - 2.0*s)
        object.__setattr__(self, 'C_ds', kernel_constant(d, s))
        object.__setattr__(self, 'd_s', dtn_constant(s))

    def with_dim(self, d:int)->'FractionalParams':
        return FractionalParams(self.s, d)
