# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

import os
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional

import numpy as np
from overrides import EnforceOverrides, overrides

from ..common.artifacts import write_coo, write_csv, write_json
from ..common.common import get_conf_common, logger
from ..common.errors import DomainError
from ..common.parallel import ParallelSettings, get_settings, set_settings
from ..diagnostics import RegularityReport, VertexInterval, analytic_data_classifier, \
    caccioppoli_high_order, caccioppoli_interior_check, hardy_check, localization_check, \
    regularity_table, tubular_bound_check
from ..extension import ExtensionField, box_grid, dtn_trace, n_check, poincare_check, \
    shift_probe_grid, solve_extension, trace_inequality_check, trace_mesh_1d, y_mesh
from ..fields import ConstantField, GetoorField, GridField, ScalarField, scaled
from ..fracops import getoor_constant, set_cache_dir
from ..geometry import cover_edge, cover_vertex, cover_vertex_edge, decompose, \
    radius_distance_constant, write_certificate, write_covering_csv
from ..solver1d import DiscreteSolution, convergence_study, error_norms, galerkin_defect, \
    graded_mesh, solve_dirichlet_1d
from .run_config import RunConfig


CONVERGENCE_COLUMNS = ('n', 'h', 'unknowns', 'energy_value', 'L2', 'energy', 'linf_interior')


# region shared pipeline steps
def direct_solution(rc:RunConfig)->DiscreteSolution:
    mesh = graded_mesh(rc.n, rc.grading, rc.interval())
    f = rc.f or ConstantField(0.0)
    return solve_dirichlet_1d(f, rc.params, mesh, rc.degree, rc.tol)

def reference_field(rc:RunConfig)->Optional[ScalarField]:
    """Closed form solution for the configured data, None without a reference."""
    if rc.reference == 'none':
        return None
    if rc.reference == 'zero':
        return ConstantField(0.0, rc.d)
    # (-Δ)^s (1 - |x - m|²/R²)_+^s = R^{-2s} getoor_constant on the ball
    a, b = rc.interval()
    R = 0.5*(b - a)
    profile = GetoorField(rc.s, 1, R, [0.5*(a + b)])
    return scaled(profile, rc.f.c*R**(2*rc.s)/getoor_constant(1, rc.s))

def extension_solution(rc:RunConfig)->ExtensionField:
    if rc.d == 1:
        trace_mesh = trace_mesh_1d(graded_mesh(rc.n, rc.grading, rc.interval()), rc.margin, rc.growth)
        diam = rc.domain[1] - rc.domain[0]
    else:
        trace_mesh = list(box_grid(rc.polygon(), rc.box_n, rc.margin, rc.growth))
        diam = rc.polygon().diameter
    Y = 4.0*diam if rc.Y is None else rc.Y
    ym = y_mesh(Y, rc.y_first, max_cell=rc.y_max_cell)
    return solve_extension(rc.f, rc.F, rc.params, trace_mesh, y_mesh=ym, omega=rc.domain,
                           degree=rc.degree, tol=rc.tol)

def _nearest_levels(U:ExtensionField, ys:List[float])->List[int]:
    nodes = U.y_mesh.nodes
    return sorted(set(int(np.argmin(np.abs(nodes - y))) for y in ys))

def _trace_values(U:ExtensionField)->GridField:
    """tr U on the trace grid, zero off Ω."""
    mask = U.trace_mask()
    return GridField(U.disc.x_coords(), np.where(mask, U.level(0), 0.0))
# endregion


class PipelineRunner(ABC, EnforceOverrides):
    """One subcommand: reads its inputs from a validated RunConfig and writes
    its artifacts to the experiment directory."""
    name = ''

    def __init__(self, run_conf:RunConfig) -> None:
        self.run_conf = run_conf
        self.header = run_conf.header()

    def outpath(self, filename:str)->str:
        return os.path.join(self.run_conf.expdir, filename)

    def run(self)->List[str]:
        conf_common = get_conf_common(self.run_conf.conf)
        set_settings(ParallelSettings.from_conf(conf_common))
        set_cache_dir(conf_common.get_val('quadrature_cache', '') or None)
        with logger.pushd(self.name):
            logger.info({'config_hash': self.run_conf.config_hash, 'seed': self.run_conf.seed,
                         'threads': get_settings().threads})
            paths = self.execute()
            logger.info({'artifacts': [os.path.basename(p) for p in paths]})
        return paths

    @abstractmethod
    def execute(self)->List[str]:
        pass


class SolveRunner(PipelineRunner):
    name = 'solve'

    @overrides
    def execute(self)->List[str]:
        rc = self.run_conf
        if rc.d == 1:
            return self._solve_direct()
        return self._solve_extension()

    def _solve_direct(self)->List[str]:
        rc = self.run_conf
        sol = direct_solution(rc)
        ref = reference_field(rc)
        x, u = sol.sample(rc.samples)
        columns = ['x', 'u']
        rows = [x, u]
        summary:Dict[str, Any] = {'s': rc.s, 'd': 1, 'n': rc.n, 'degree': rc.degree,
                                  'grading': rc.grading, 'unknowns': len(sol.free_coeffs),
                                  'energy': sol.energy, 'residual': sol.residual,
                                  'galerkin_defect': galerkin_defect(sol)}
        if ref is not None:
            u_ref = ref.value(x)
            columns += ['u_ref', 'error']
            rows += [u_ref, u - u_ref]
            summary['reference'] = rc.reference
            summary['errors'] = error_norms(sol, ref)
        paths = [write_csv(self.outpath('solution.csv'), self.header, columns, zip(*rows)),
                 write_json(self.outpath('summary.json'), self.header, summary)]
        if rc.export_matrix:
            paths.append(write_coo(self.outpath('stiffness.coo'), self.header, sol.matrix))
        logger.info({'solution': {k: v for k, v in summary.items() if k != 'errors'}})
        return paths

    def _solve_extension(self)->List[str]:
        """u = tr U on a polygon, U the minimizer of the extension problem."""
        rc = self.run_conf
        U = extension_solution(rc)
        mask = U.trace_mask().ravel()
        pts = U.disc.trace_points()[mask]
        u = U.level(0).ravel()[mask]
        columns = ['x1', 'x2', 'u']
        rows = [pts[:, 0], pts[:, 1], u]
        summary:Dict[str, Any] = {'s': rc.s, 'd': 2, 'box_n': rc.box_n, 'degree': rc.degree,
                                  'unknowns': int(U.free.sum()), 'energy': U.energy,
                                  'residual': U.residual,
                                  'euler_lagrange_defect': U.euler_lagrange_defect()}
        if rc.reference == 'zero':
            summary['reference'] = 'zero'
            summary['errors'] = {'linf': float(np.max(np.abs(u))) if len(u) else 0.0}
        paths = [write_csv(self.outpath('solution.csv'), self.header, columns, zip(*rows)),
                 write_json(self.outpath('summary.json'), self.header, summary)]
        logger.info({'solution': {k: v for k, v in summary.items() if k != 'errors'}})
        return paths


class ExtendRunner(PipelineRunner):
    name = 'extend'

    @overrides
    def execute(self)->List[str]:
        rc = self.run_conf
        U = extension_solution(rc)
        paths = [U.write_slices_csv(self.outpath('extension_slices.csv'), self.header,
                                    _nearest_levels(U, rc.y_slices))]

        g = dtn_trace(U, method=rc.dtn_method)
        mask = U.trace_mask()
        if U.d == 1:
            pts = g.axes[0][:, None]
            dtn = g.values
        else:
            pts = U.disc.trace_points()[mask.ravel()]
            dtn = g.values.ravel()[mask.ravel()]
        f_vals = rc.f.value(pts) if rc.f is not None else np.zeros(len(pts))
        columns = ['x', 'dtn', 'f'] if U.d == 1 else ['x1', 'x2', 'dtn', 'f']
        paths.append(write_csv(self.outpath('dtn.csv'), self.header, columns,
                               (tuple(p) + (v, fv) for p, v, fv in zip(pts, dtn, f_vals))))

        f_norm = float(np.linalg.norm(f_vals))
        summary:Dict[str, Any] = {
            's': rc.s, 'd': U.d, 'Y': U.Y, 'H': U.H, 'energy': U.energy, 'residual': U.residual,
            'dtn_method': rc.dtn_method,
            'dtn_residual': float(np.linalg.norm(dtn - f_vals))/f_norm if f_norm > 0 else None}
        if U.d == 1:
            summary['n_check'] = n_check(U).as_dict()
            if U.energy > 0.0:
                summary['trace_inequality'] = trace_inequality_check(U)
                summary['poincare'] = poincare_check(U, rc.poincare_H)
                summary['shift_probe'] = shift_probe_grid(U, rc.shift_t)
        paths.append(write_json(self.outpath('extension.json'), self.header, summary))
        logger.info({'extension': {'energy': U.energy, 'dtn_residual': summary['dtn_residual']}})
        return paths


class VerifyRunner(PipelineRunner):
    name = 'verify'

    def __init__(self, run_conf:RunConfig) -> None:
        super().__init__(run_conf)
        self._extension:Optional[ExtensionField] = None

    def extension(self)->ExtensionField:
        if self._extension is None:
            self._extension = extension_solution(self.run_conf)
        return self._extension

    def field(self)->ScalarField:
        rc = self.run_conf
        if rc.field_source == 'analytic':
            return rc.analytic
        if rc.field_source == 'solution':
            return direct_solution(rc)
        U = self.extension()
        return U.trace() if U.d == 1 else _trace_values(U)

    def regions(self)->List:
        rc = self.run_conf
        if rc.d == 1:
            a = rc.interval()[0]
            return [VertexInterval(v, rc.vertex_length, 1 if v == a else -1) for v in rc.vertices]
        return decompose(rc.polygon(), rc.xi, rc.width_factor, seed=rc.seed).regions

    def inequality_checks(self, u:ScalarField, regions:List)->Dict[str, Any]:
        rc = self.run_conf
        out:Dict[str, Any] = {}
        if 'hardy' in rc.checks:
            out['hardy'] = {r.label: hardy_check(u, r, rc.hardy_epsilon, rc.s, rc.quadrature)
                            for r in regions if r.kind in ('vertex', 'edge')}
        if 'localization' in rc.checks:
            loc = rc.localization
            out['localization'] = localization_check(rc.f, rc.s, loc['R_ladder'], loc['center'],
                                                     loc['c'], rc.interval(), loc['n'], rc.degree + 1)
        if 'data_class' in rc.checks:
            out['data_class'] = analytic_data_classifier(rc.f, rc.data_class_j_max,
                                                         rc.domain)._asdict()
        if 'caccioppoli' in rc.checks:
            cac = rc.caccioppoli
            U = self.extension()
            out['caccioppoli'] = {
                'interior': caccioppoli_interior_check(U, cac['center'], cac['R'], cac['c'], U.f, U.F,
                                                       levels=cac['levels']).as_dict(),
                'gamma_p': caccioppoli_high_order(U, cac['center'], cac['R'], cac['c'],
                                                  cac['orders'], U.f, U.F)}
        if 'tubular' in rc.checks:
            out['tubular'] = tubular_bound_check(self.extension(), rc.tubular['R_ladder'],
                                                 rc.tubular['t'])
        return out

    def verify(self)->RegularityReport:
        rc = self.run_conf
        u = self.field()
        regions = self.regions()
        if rc.p_range[-1] > u.p_max:
            raise DomainError(f'diagnostics.p_range reaches {rc.p_range[-1]} but the '
                              f'{rc.field_source} field has p_max={u.p_max}')
        report = regularity_table(u, regions, rc.p_range, rc.eps_set, rc.s, rc.quadrature,
                                  rc.strict, get_settings())
        report.metadata.update(field_source=rc.field_source, d=rc.d)
        for name, table in self.inequality_checks(u, regions).items():
            report.add_check(name, table)
        return report

    @overrides
    def execute(self)->List[str]:
        report = self.verify()
        paths = report.write_all(self.run_conf.expdir, self.header)
        paths.append(write_json(self.outpath('inequality_checks.json'), self.header,
                                {'checks': report.inequality_checks}))
        return paths


class CoverRunner(PipelineRunner):
    name = 'cover'

    @overrides
    def execute(self)->List[str]:
        rc = self.run_conf
        dec = decompose(rc.polygon(), rc.cover_xi, rc.cover_width_factor, seed=rc.seed)
        coverings, certificates = [], {}
        for region in dec.regions:
            if region.kind not in rc.cover_kinds:
                continue
            p = rc.cover_params[region.kind]
            if region.kind == 'vertex':
                cov = cover_vertex(region, p['c'], p['c_hat'], p['c_tilde'], rc.cover_deltas,
                                   rc.cover_samples, rc.seed, progress=rc.progress)
                cert = cov.certificate()
                cert['C_B'] = radius_distance_constant(cov, seed=rc.seed)
            elif region.kind == 'vertex_edge':
                vec = cover_vertex_edge(region, p['c'], p['c_hat'], p['c_tilde'], p['c1'],
                                        p['c1_hat'], deltas=rc.cover_deltas,
                                        samples=rc.cover_samples, sub_samples=p['sub_samples'],
                                        seed=rc.seed, progress=rc.progress)
                cov, cert = vec.outer, vec.certificate()
            else:
                cov = cover_edge(region, p['c'], p['c_hat'], p['c_tilde'], p['depth'], p['deltas'],
                                 rc.cover_samples, rc.seed, progress=rc.progress)
                cert = cov.certificate()
                cert['C_B'] = radius_distance_constant(cov, seed=rc.seed)
            coverings.append(cov)
            certificates[region.label] = cert
        logger.info({'coverings': len(coverings),
                     'balls': int(sum(len(c) for c in coverings))}, exists_ok=True)
        return [write_covering_csv(self.outpath('coverings.csv'), self.header, coverings),
                write_certificate(self.outpath('certificates.json'), self.header, certificates),
                write_json(self.outpath('decomposition.json'), self.header, dec.summary())]


class ReportRunner(VerifyRunner):
    """Convergence study, regularity table and inequality checks in one run."""
    name = 'report'

    @overrides
    def execute(self)->List[str]:
        rc = self.run_conf
        paths = super().execute()
        summary:Dict[str, Any] = {'fits': {k: f._asdict() for k, f in self._last_report.fits.items()},
                                  'checks': sorted(self._last_report.inequality_checks)}
        ref = reference_field(rc) if rc.d == 1 else None
        if ref is not None:
            study = convergence_study(rc.params, rc.f or ConstantField(0.0), ref, rc.n_list,
                                      rc.degree, rc.grading, rc.interval())
            paths.append(write_csv(self.outpath('convergence.csv'), self.header, CONVERGENCE_COLUMNS,
                                   ([row[c] for c in CONVERGENCE_COLUMNS] for row in study['rows'])))
            summary['convergence'] = {'rates': study['rates'], 'beta': study['beta'],
                                      'degree': study['degree']}
        paths.append(write_json(self.outpath('report.json'), self.header, summary))
        return paths

    @overrides
    def verify(self)->RegularityReport:
        self._last_report = super().verify()
        return self._last_report


RUNNERS = {'solve': SolveRunner, 'extend': ExtendRunner, 'verify': VerifyRunner,
           'cover': CoverRunner, 'report': ReportRunner}
