# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

from dataclasses import asdict, dataclass, field
import math
import os
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from ..common.artifacts import ArtifactHeader, write_csv, write_json
from ..common.common import logger
from ..common.errors import DivergenceError, DomainError
from ..common.parallel import ParallelSettings, ordered_map
from ..common.timing import MeasureTime
from ..fields.scalar_field import ScalarField
from ..geometry.decomposition import NeighborhoodDecomposition
from .fit import GammaFit, envelope, fit_gamma
from .norms import NormQuadrature, NormSpec, TRegion, region_norms


REPORT_COLUMNS = ('region', 'kind', 'p', 'p_perp', 'p_par', 'epsilon', 'norm')
FIT_COLUMNS = ('region', 'epsilon', 'C_eps', 'gamma', 'residual')
PLOT_COLUMNS = ('region', 'epsilon', 'p', 'log_norm', 'log_envelope')

DEFAULT_EPSILONS = (0.05, 0.1, 0.25)


@dataclass(frozen=True)
class ReportRow:
    region: str
    kind: str
    p: int
    p_perp: Optional[int]
    p_par: Optional[int]
    epsilon: float
    norm: float

    def values(self)->Tuple:
        return tuple(getattr(self, c) for c in REPORT_COLUMNS)


def fit_key(region:str, epsilon:float)->str:
    return f'{region}@{epsilon:g}'


@dataclass
class RegularityReport:
    """Weighted norm rows, growth fits per (region, ε) and named inequality
    ratio tables."""
    rows: List[ReportRow]
    fits: Dict[str, GammaFit] = field(default_factory=dict)
    inequality_checks: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def divergent_rows(self)->List[ReportRow]:
        return [r for r in self.rows if math.isinf(r.norm)]

    def growth_rows(self, region:str, epsilon:float)->Dict[int, float]:
        """norm per p, the max over splits for edge and vertex-edge rows."""
        out:Dict[int, float] = {}
        for r in self.rows:
            if r.region == region and r.epsilon == epsilon:
                out[r.p] = max(out.get(r.p, 0.0), r.norm)
        return out

    def add_check(self, name:str, table:Dict[str, Any])->None:
        self.inequality_checks[name] = table

    def write_csv(self, filepath:str, header:ArtifactHeader)->str:
        return write_csv(filepath, header, REPORT_COLUMNS, (r.values() for r in self.rows))

    def write_fits_csv(self, filepath:str, header:ArtifactHeader)->str:
        rows = []
        for key, fit in self.fits.items():
            region, eps = key.rsplit('@', 1)
            rows.append((region, float(eps), fit.C_eps, fit.gamma, fit.residual))
        return write_csv(filepath, header, FIT_COLUMNS, rows)

    def write_plot_data(self, filepath:str, header:ArtifactHeader)->str:
        """(p, log norm, log envelope) per fitted group for external plotting."""
        rows = []
        for key, fit in self.fits.items():
            region, eps = key.rsplit('@', 1)
            for p, v in sorted(self.growth_rows(region, float(eps)).items()):
                env = envelope(fit.C_eps, fit.gamma, p)
                rows.append((region, float(eps), p, math.log(v) if v > 0 else -math.inf,
                             math.log(env) if env > 0 else -math.inf))
        return write_csv(filepath, header, PLOT_COLUMNS, rows)

    def as_dict(self)->Dict[str, Any]:
        return {'rows': [asdict(r) for r in self.rows],
                'fits': {k: f._asdict() for k, f in self.fits.items()},
                'inequality_checks': self.inequality_checks,
                'metadata': self.metadata}

    def write_json(self, filepath:str, header:ArtifactHeader)->str:
        return write_json(filepath, header, self.as_dict())

    def write_all(self, outdir:str, header:ArtifactHeader)->List[str]:
        return [self.write_csv(os.path.join(outdir, 'regularity.csv'), header),
                self.write_fits_csv(os.path.join(outdir, 'regularity_fits.csv'), header),
                self.write_plot_data(os.path.join(outdir, 'regularity_plot.csv'), header),
                self.write_json(os.path.join(outdir, 'regularity.json'), header)]


def _specs(kind:str, p:int, s:float, epsilon:float)->List[NormSpec]:
    if kind in ('edge', 'vertex_edge'):
        return [NormSpec.split(p - k, k, epsilon, s) for k in range(p + 1)]
    return [NormSpec(p, epsilon, s)]

@MeasureTime
def regularity_table(u:ScalarField,
                     regions:Union[NeighborhoodDecomposition, Sequence[TRegion]],
                     p_range:Sequence[int], eps_set:Sequence[float]=DEFAULT_EPSILONS,
                     s:float=0.5, quadrature:Optional[NormQuadrature]=None,
                     strict:bool=True,
                     settings:Optional[ParallelSettings]=None)->RegularityReport:
    """Weighted norms of u for every region, p in p_range (all splits
    p = p⊥ + p∥ on edge and vertex-edge regions) and ε in eps_set, then a
    growth fit per (region, ε) that has at least three orders. In strict mode
    a divergent row raises DivergenceError naming it."""
    region_list = list(regions.regions if isinstance(regions, NeighborhoodDecomposition) else regions)
    p_range = sorted(set(int(p) for p in p_range))
    eps_set = [float(e) for e in eps_set]
    if not p_range or not eps_set:
        raise DomainError('a regularity table needs at least one order and one epsilon')
    if p_range[-1] > u.p_max:
        raise DomainError(f'order {p_range[-1]} exceeds p_max={u.p_max} of this {u.kind} field')

    tasks = [(region, spec) for region in region_list for p in p_range
             for spec in _specs(region.kind, p, s, eps_set[0])]

    def run(task):
        region, spec = task
        return region_norms(u, region, spec, eps_set, quadrature)
    results = ordered_map(run, tasks, settings, desc='regularity rows')

    rows = [ReportRow(region.label, region.kind, spec.p, spec.p_perp, spec.p_par, e, float(n))
            for (region, spec), norms in zip(tasks, results) for e, n in zip(eps_set, norms)]
    report = RegularityReport(rows, metadata={'s': s, 'p_range': p_range, 'eps_set': eps_set,
                                              'field_kind': u.kind, 'p_max': min(u.p_max, 1 << 20)})

    divergent = report.divergent_rows()
    if divergent and strict:
        r = divergent[0]
        raise DivergenceError(f'weighted norm diverges on {r.region} (p={r.p}, ε={r.epsilon:g})',
                              row=(r.region, r.p, r.p_perp, r.p_par, r.epsilon))

    refused = []
    for region in region_list:
        for e in eps_set:
            growth = report.growth_rows(region.label, e)
            if len(growth) < 3:
                continue
            if any(math.isinf(v) for v in growth.values()):
                refused.append(fit_key(region.label, e))
                continue
            report.fits[fit_key(region.label, e)] = fit_gamma(growth)
    report.metadata['fit_refused'] = refused
    logger.info({'regularity_table': {'rows': len(rows), 'fits': len(report.fits),
                 'divergent': len(divergent)}}, exists_ok=True)
    return report
