# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

"""Envelope fits of analytic growth, norm_p ≤ C γ^{p+1} p^p (0^0 = 1)."""

import math
from typing import List, Mapping, NamedTuple, Sequence, Tuple, Union

import numpy as np
from scipy.stats import qmc

from ..common.common import logger
from ..common.errors import DivergenceError, DomainError
from ..fields.scalar_field import ScalarField
from ..fracops.quadrature import composite_gauss
from ..geometry.polygon import Polygon


class GammaFit(NamedTuple):
    C_eps: float
    gamma: float
    residual: float


TRows = Union[Mapping[int, float], Sequence[Tuple[int, float]]]


def _plogp(p:int)->float:
    return p*math.log(p) if p > 0 else 0.0

def _as_rows(rows:TRows)->List[Tuple[int, float]]:
    items = rows.items() if isinstance(rows, Mapping) else rows
    out = sorted((int(p), float(v)) for p, v in items)
    if len(out) < 3:
        raise DomainError(f'a growth fit needs at least 3 rows, got {len(out)}')
    for p, v in out:
        if math.isinf(v) or math.isnan(v):
            raise DivergenceError('growth fit refused, row is not finite', row=p)
        if v < 0:
            raise DomainError(f'row p={p} has a negative norm {v}')
    return out

def envelope(C:float, gamma:float, p:int)->float:
    return C*gamma**(p + 1)*math.exp(_plogp(p))

def fit_gamma(rows:TRows)->GammaFit:
    """Least squares line through log(norm_p) - p log p, whose slope is log γ;
    γ is reported as at least 1 (a faster decay fits the γ = 1 envelope too).
    C is then the smallest constant putting every row on or below the
    envelope. `residual` is the RMS misfit of the least squares line."""
    rows = _as_rows(rows)
    pos = [(p, math.log(v) - _plogp(p)) for p, v in rows if v > 0]
    if not pos:
        return GammaFit(0.0, 1.0, 0.0)
    ps = np.array([p for p, _ in pos], dtype=float)
    ys = np.array([y for _, y in pos])
    if len(pos) >= 2:
        slope, icpt = np.polyfit(ps, ys, 1)
        residual = float(np.sqrt(np.mean((ys - (icpt + slope*ps))**2)))
    else:
        slope, residual = 0.0, 0.0
    log_gamma = max(float(slope), 0.0)
    # smallest log C with log C + (p+1) log γ ≥ y_p for all rows
    log_C = float(np.max(ys - (ps + 1.0)*log_gamma))
    fit = GammaFit(math.exp(log_C), math.exp(log_gamma), residual)
    logger.debug({'fit_gamma': {'rows': len(rows), 'slope': float(slope), 'C_eps': fit.C_eps,
                  'gamma': fit.gamma, 'residual': residual}}, exists_ok=True)
    return fit

def rows_above(rows:TRows, fit:GammaFit, rtol:float=1e-12)->List[int]:
    """p of the rows lying above the envelope of `fit`."""
    return [p for p, v in _as_rows(rows) if v > envelope(fit.C_eps, fit.gamma, p)*(1.0 + rtol)]


class DataClass(NamedTuple):
    gamma_f: float
    sums: List[float]
    residual: float


def _l2_sampler(domain, dim:int, n:int):
    """Points and weights of an L² quadrature on an interval or a polygon."""
    if isinstance(domain, Polygon):
        if dim != 2:
            raise DomainError('data on a polygon must be two dimensional')
        lo, hi = domain.bbox
        m = max(1, int(math.ceil(math.log2(max(n, 2)))))
        pts = lo + (hi - lo)*qmc.Sobol(d=2, scramble=True, seed=0).random_base2(m)
        inside = domain.contains(pts)
        w = np.where(inside, float(np.prod(hi - lo))/len(pts), 0.0)
        return pts, w
    a, b = float(domain[0]), float(domain[1])
    if dim != 1 or not b > a:
        raise DomainError('data on an interval must be one dimensional and the interval nonempty')
    x, w = composite_gauss(np.linspace(a, b, 33), 12)
    return x[:, None], w

def analytic_data_classifier(f:ScalarField, j_max:int,
                             domain:Union[Tuple[float, float], Polygon],
                             n:int=1 << 14)->DataClass:
    """The smallest γ_f with Σ_{|β|=j} ‖∂^β f‖_{L²(Ω)} ≤ γ_f^{j+1} j^j for
    j = 0..j_max. `residual` is max_j log(sum_j / envelope_j), ≤ 0 by
    construction (0 when the bound is attained)."""
    if j_max < 0:
        raise DomainError(f'j_max={j_max} must be nonnegative')
    if j_max > f.p_max:
        raise DomainError(f'j_max={j_max} exceeds p_max={f.p_max} of the data')
    pts, w = _l2_sampler(domain, f.dim, n)
    sums = []
    for j in range(j_max + 1):
        if f.dim == 1:
            betas = [(j,)]
        else:
            betas = [(i, j - i) for i in range(j + 1)]
        sums.append(sum(math.sqrt(max(float(w @ f.partial(pts, b)**2), 0.0)) for b in betas))
    gamma_f = 0.0
    for j, v in enumerate(sums):
        if v > 0:
            gamma_f = max(gamma_f, math.exp((math.log(v) - _plogp(j))/(j + 1)))
    residual = max((math.log(v) - (j + 1)*math.log(gamma_f) - _plogp(j)
                    for j, v in enumerate(sums) if v > 0), default=0.0)
    logger.info({'analytic_data': {'j_max': j_max, 'gamma_f': gamma_f}}, exists_ok=True)
    return DataClass(gamma_f, sums, residual)
