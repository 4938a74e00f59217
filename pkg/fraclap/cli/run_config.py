# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

import math
from collections.abc import Mapping
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from ..common.artifacts import ArtifactHeader, config_hash
from ..common.config import Config
from ..common.errors import ConfigError, DomainError
from ..diagnostics.norms import NormQuadrature
from ..fields import ConstantField, ScalarField, create_field
from ..fracops import FractionalParams
from ..geometry import Polygon, load_polygon, make_polygon
from ..geometry.decomposition import KINDS
from ..solver1d import default_grading


TDomain = Union[Tuple[float, float], Polygon]

DOMAIN_KINDS = ('interval', 'square', 'lshape', 'sector', 'quarter_plane', 'polygon')
REFERENCES = ('getoor', 'zero', 'none')
FIELD_SOURCES = ('solution', 'analytic', 'extension')
CHECKS = ('hardy', 'localization', 'data_class', 'caccioppoli', 'tubular')
DTN_METHODS = ('weak', 'levels')

# sections whose content determines the artifacts
HASHED_SECTIONS = ('problem', 'discretization', 'extension', 'diagnostics', 'covering')


def _section(conf:Mapping, key:str)->Mapping:
    val = conf.get(key, None)
    if not isinstance(val, Mapping):
        raise ConfigError(f'config section "{key}" is missing or not a mapping')
    return val

def _num(section:Mapping, key:str, where:str, lo:Optional[float]=None,
         hi:Optional[float]=None, open_lo=True, allow_none=False)->Optional[float]:
    val = section.get(key, None)
    if val is None:
        if allow_none:
            return None
        raise ConfigError(f'{where}.{key} is required')
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f'{where}.{key} must be a number, got {val!r}')
    val = float(val)
    if not math.isfinite(val):
        raise ConfigError(f'{where}.{key} must be finite')
    if lo is not None and (val <= lo if open_lo else val < lo):
        raise ConfigError(f'{where}.{key}={val:g} must be {">" if open_lo else ">="} {lo:g}')
    if hi is not None and val >= hi:
        raise ConfigError(f'{where}.{key}={val:g} must be < {hi:g}')
    return val

def _int(section:Mapping, key:str, where:str, lo:int=0, allow_none=False)->Optional[int]:
    val = section.get(key, None)
    if val is None and allow_none:
        return None
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(f'{where}.{key} must be an integer, got {val!r}')
    if val < lo:
        raise ConfigError(f'{where}.{key}={val} must be >= {lo}')
    return val

def _num_list(section:Mapping, key:str, where:str, lo:Optional[float]=None,
              open_lo=True, integer=False, nonempty=True)->List:
    val = section.get(key, None)
    if not isinstance(val, (list, tuple)) or (nonempty and not val):
        raise ConfigError(f'{where}.{key} must be a {"nonempty " if nonempty else ""}list')
    holder = {key: None}
    out = []
    for v in val:
        holder[key] = v
        out.append(_int(holder, key, where, int(lo or 0)) if integer
                   else _num(holder, key, where, lo, open_lo=open_lo))
    return out

def _choice(section:Mapping, key:str, where:str, choices:Sequence[str])->str:
    val = section.get(key, None)
    if val not in choices:
        raise ConfigError(f'{where}.{key}={val!r} must be one of {list(choices)}')
    return val


def _domain(conf_domain:Mapping)->TDomain:
    kind = _choice(conf_domain, 'kind', 'problem.domain', DOMAIN_KINDS)
    if kind == 'interval':
        ends = _num_list(conf_domain, 'interval', 'problem.domain', open_lo=False)
        if len(ends) != 2 or not ends[1] > ends[0]:
            raise ConfigError(f'problem.domain.interval must be [a, b] with a < b, got {ends}')
        return (ends[0], ends[1])
    try:
        if kind == 'polygon':
            vertices = conf_domain.get('vertices', None)
            if vertices:
                return Polygon(vertices, name='polygon')
            filepath = conf_domain.get('file', '')
            if not filepath:
                raise ConfigError('a polygon domain needs problem.domain.vertices or problem.domain.file')
            return load_polygon(filepath)
        if kind == 'sector':
            return make_polygon('sector', angle=_num(conf_domain, 'angle', 'problem.domain', 0.0,
                                                      2*math.pi))
        return make_polygon(kind)
    except DomainError as e:
        raise ConfigError(f'problem.domain is invalid: {e}') from e

def _covering_params(conf_kind:Mapping, where:str)->Dict[str, float]:
    c = _num(conf_kind, 'c', where, 0.0, 1.0)
    c_hat = _num(conf_kind, 'c_hat', where, 0.0, 1.0)
    c_tilde = _num(conf_kind, 'c_tilde', where, 0.0, 1.0, allow_none=True)
    c_tilde = 0.5*(c + c_hat) if c_tilde is None else c_tilde
    if not c < c_tilde < c_hat:
        raise ConfigError(f'{where} needs 0 < c < c_tilde < c_hat < 1, '
                          f'got c={c:g}, c_tilde={c_tilde:g}, c_hat={c_hat:g}')
    return {'c': c, 'c_tilde': c_tilde, 'c_hat': c_hat}


class RunConfig:
    """Validated and normalized view of a run's Config. Every schema violation
    raises ConfigError here, before anything is written; after normalization
    every default is explicit in `normalized`, whose hash goes into the
    header of every artifact."""

    def __init__(self, conf:Config) -> None:
        self.conf = conf
        conf_common = _section(conf, 'common')
        conf_problem = _section(conf, 'problem')
        conf_disc = _section(conf, 'discretization')
        conf_ext = _section(conf, 'extension')
        conf_diag = _section(conf, 'diagnostics')
        conf_cov = _section(conf, 'covering')

        # region common
        self.seed = _int(conf_common, 'seed', 'common')
        self.threads = _int(conf_common, 'threads', 'common', 1, allow_none=True)
        self.progress = bool(conf_common.get('progress', False))
        # endregion

        # region problem
        self.domain:TDomain = _domain(_section(conf_problem, 'domain'))
        self.d = 2 if isinstance(self.domain, Polygon) else 1
        self.s = _num(conf_problem, 's', 'problem', 0.0, 1.0)
        self.params = FractionalParams(self.s, self.d)
        self.f:Optional[ScalarField] = create_field(conf_problem.get('f', None), self.d)
        self.F:Optional[ScalarField] = create_field(conf_problem.get('F', None), self.d + 1)
        self.reference = _choice(conf_problem, 'reference', 'problem', REFERENCES)
        if self.reference == 'getoor' and (self.d != 1 or not isinstance(self.f, ConstantField)):
            raise ConfigError('problem.reference getoor needs constant f on an interval')
        # endregion

        # region discretization
        where = 'discretization'
        self.n = _int(conf_disc, 'n', where, 2)
        self.degree = _int(conf_disc, 'degree', where, 1)
        grading = _num(conf_disc, 'grading', where, 1.0, open_lo=False, allow_none=True)
        self.grading = default_grading(self.s) if grading is None else grading
        self.n_list = _num_list(conf_disc, 'n_list', where, 2, integer=True)
        self.samples = _int(conf_disc, 'samples', where, 2)
        self.box_n = _int(conf_disc, 'box_n', where, 2)
        self.margin = _num(conf_disc, 'margin', where, 0.0)
        self.growth = _num(conf_disc, 'growth', where, 1.0, open_lo=False)
        self.Y = _num(conf_disc, 'Y', where, 0.0, allow_none=True)
        self.y_first = _num(conf_disc, 'y_first', where, 0.0, allow_none=True)
        self.y_max_cell = _num(conf_disc, 'y_max_cell', where, 0.0, allow_none=True)
        self.tol = _num(conf_disc, 'tol', where, 0.0)
        self.export_matrix = bool(conf_disc.get('export_matrix', False))
        # endregion

        # region extension
        where = 'extension'
        self.dtn_method = _choice(conf_ext, 'dtn_method', where, DTN_METHODS)
        self.y_slices = _num_list(conf_ext, 'y_slices', where, 0.0, open_lo=False)
        self.shift_t = _num_list(conf_ext, 'shift_t', where, 0.0, open_lo=False)
        if any(t >= 0.5 for t in self.shift_t):
            raise ConfigError('extension.shift_t values must lie in [0, 1/2)')
        self.poincare_H = _num(conf_ext, 'poincare_H', where, 0.0)
        # endregion

        # region diagnostics
        where = 'diagnostics'
        self.field_source = _choice(conf_diag, 'field', where, FIELD_SOURCES)
        self.analytic:Optional[ScalarField] = create_field(conf_diag.get('analytic', None), self.d)
        if self.field_source == 'analytic' and self.analytic is None:
            raise ConfigError('diagnostics.field is analytic but diagnostics.analytic is empty')
        if self.field_source == 'solution' and self.d != 1:
            raise ConfigError('the direct solver is one dimensional, use diagnostics.field analytic '
                              'or extension on polygons')
        length = _num(conf_diag, 'vertex_length', where, 0.0, allow_none=True)
        if self.d == 1:
            a, b = self.domain
            length = 0.25*(b - a) if length is None else length
            if length > b - a:
                raise ConfigError(f'diagnostics.vertex_length={length:g} exceeds |Ω|={b - a:g}')
        self.vertex_length = length
        vertices = conf_diag.get('vertices', None)
        self.vertices:Optional[List[float]] = None
        if self.d == 1:
            a, b = self.domain
            self.vertices = [a, b] if vertices is None else _num_list(conf_diag, 'vertices', where)
            if not self.vertices or any(v not in (a, b) for v in self.vertices):
                raise ConfigError(f'{where}.vertices={vertices!r} must list ends of the interval {self.domain}')
        self.xi = _num(conf_diag, 'xi', where, 0.0, allow_none=True)
        self.width_factor = _num(conf_diag, 'edge_width_factor', where, 0.0)
        self.p_range = sorted(set(_num_list(conf_diag, 'p_range', where, 0, integer=True)))
        self.eps_set = _num_list(conf_diag, 'eps_set', where, 0.0, open_lo=False)
        self.strict = bool(conf_diag.get('strict', True))
        conf_quad = _section(conf_diag, 'quadrature')
        try:
            self.quadrature = NormQuadrature(**{k: _int(conf_quad, k, f'{where}.quadrature', 1)
                                                for k in conf_quad})
        except TypeError as e:
            raise ConfigError(f'{where}.quadrature has an unknown key: {e}') from e
        checks = conf_diag.get('checks', None) or []
        if not isinstance(checks, (list, tuple)) or any(c not in CHECKS for c in checks):
            raise ConfigError(f'{where}.checks={checks!r} must be a list drawn from {list(CHECKS)}')
        self.checks = list(checks)
        self.hardy_epsilon = _num(conf_diag, 'hardy_epsilon', where, 0.0, open_lo=False)
        self.localization = self._localization(_section(conf_diag, 'localization'))
        self.data_class_j_max = _int(_section(conf_diag, 'data_class'), 'j_max', f'{where}.data_class')
        self.caccioppoli = self._caccioppoli(_section(conf_diag, 'caccioppoli'))
        conf_tub = _section(conf_diag, 'tubular')
        self.tubular = {'R_ladder': _num_list(conf_tub, 'R_ladder', f'{where}.tubular', 0.0),
                        't': _num(conf_tub, 't', f'{where}.tubular', 0.0, 0.5, open_lo=False)}
        if ('caccioppoli' in self.checks or 'tubular' in self.checks) and self.d != 1:
            raise ConfigError('caccioppoli and tubular checks run on one dimensional extensions')
        if 'localization' in self.checks and self.d != 1:
            raise ConfigError('the localization check runs on intervals')
        if ('localization' in self.checks or 'data_class' in self.checks) and self.f is None:
            raise ConfigError('localization and data_class checks need problem.f')
        # endregion

        # region covering
        where = 'covering'
        kinds = conf_cov.get('kinds', None) or []
        if not isinstance(kinds, (list, tuple)) or any(k not in KINDS[:3] for k in kinds):
            raise ConfigError(f'{where}.kinds={kinds!r} must be a list drawn from {list(KINDS[:3])}')
        self.cover_kinds = list(kinds)
        self.cover_xi = _num(conf_cov, 'xi', where, 0.0, allow_none=True)
        self.cover_width_factor = _num(conf_cov, 'edge_width_factor', where, 0.0)
        self.cover_samples = _int(conf_cov, 'samples', where)
        self.cover_deltas = _num_list(conf_cov, 'deltas', where, 0.0)
        self.cover_params = {k: _covering_params(_section(conf_cov, k), f'{where}.{k}')
                             for k in KINDS[:3]}
        conf_ve = _section(conf_cov, 'vertex_edge')
        c1 = _covering_params({'c': conf_ve.get('c1'), 'c_hat': conf_ve.get('c1_hat')},
                              f'{where}.vertex_edge (c1, c1_hat)')
        self.cover_params['vertex_edge'].update(
            c1=c1['c'], c1_hat=c1['c_hat'],
            sub_samples=_int(conf_ve, 'sub_samples', f'{where}.vertex_edge'))
        conf_edge = _section(conf_cov, 'edge')
        self.cover_params['edge'].update(
            depth=_int(conf_edge, 'depth', f'{where}.edge'),
            deltas=_num_list(conf_edge, 'deltas', f'{where}.edge', 0.0))
        # endregion

        self.normalized = self._normalize()
        self.config_hash = config_hash(self.normalized)

    def _localization(self, conf_loc:Mapping)->Dict[str, Any]:
        where = 'diagnostics.localization'
        return {'R_ladder': _num_list(conf_loc, 'R_ladder', where, 0.0),
                'center': _num(conf_loc, 'center', where),
                'c': _num(conf_loc, 'c', where, 0.0, 1.0),
                'n': _int(conf_loc, 'n', where, 2)}

    def _caccioppoli(self, conf_cac:Mapping)->Dict[str, Any]:
        where = 'diagnostics.caccioppoli'
        return {'center': _num_list(conf_cac, 'center', where),
                'R': _num(conf_cac, 'R', where, 0.0),
                'c': _num(conf_cac, 'c', where, 0.0, 1.0),
                'levels': _int(conf_cac, 'levels', where, 1),
                'orders': _num_list(conf_cac, 'orders', where, 1, integer=True)}

    def _normalize(self)->Dict[str, Any]:
        """Hashed sections with derived defaults filled in, plus the seed."""
        out = {k: self.conf[k].to_dict() if isinstance(self.conf[k], Config) else dict(self.conf[k])
               for k in HASHED_SECTIONS}
        out['discretization']['grading'] = self.grading
        out['diagnostics']['vertex_length'] = self.vertex_length
        out['diagnostics']['vertices'] = self.vertices
        out['diagnostics']['p_range'] = self.p_range
        for k in KINDS[:3]:
            out['covering'][k]['c_tilde'] = self.cover_params[k]['c_tilde']
        out['seed'] = self.seed
        return out

    @property
    def expdir(self)->str:
        return self.conf['common']['expdir']

    def header(self)->ArtifactHeader:
        return ArtifactHeader(self.config_hash, self.seed)

    def interval(self)->Tuple[float, float]:
        if self.d != 1:
            raise ConfigError('this command needs an interval domain')
        return self.domain

    def polygon(self)->Polygon:
        if self.d != 2:
            raise ConfigError('this command needs a polygon domain')
        return self.domain
