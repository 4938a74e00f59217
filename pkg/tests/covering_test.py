# Copyright (c) Microsoft Corporation.
# Licensed under the MIT license.

import math

import numpy as np
import pytest

from fraclap.common.artifacts import ArtifactHeader, read_body, read_header
from fraclap.common.errors import ParameterError
from fraclap.geometry import decompose, unit_square, l_shape, quarter_plane, VertexNbhd, \
    VertexEdgeNbhd, EdgeNbhd, cover_vertex, cover_vertex_edge, cover_edge, \
    radius_distance_constant, certify_coverage, write_covering_csv, write_certificate


def _quarter_vertex():
    return decompose(quarter_plane(), 0.5).region('v0')

def test_vertex_covering_covers():
    cov = cover_vertex(_quarter_vertex(), 0.25, 0.45, 0.35)
    assert cov.n_samples == 100_000
    assert cov.coverage == 1.0
    assert cov.radii.min() >= 1e-12
    assert cov.floor < 1e-10

def test_vertex_covering_overlap_stable():
    cov = cover_vertex(_quarter_vertex(), 0.25, 0.45, 0.35)
    hist = cov.overlap_history
    assert len(hist) >= 2 and hist[-1][1] == hist[-2][1]
    assert 1 <= cov.overlap_N < 100
    assert hist[-1][0] == 2*hist[-2][0]

def test_vertex_covering_self_similar():
    cov = cover_vertex(_quarter_vertex(), 0.25, 0.45)
    shell0 = cov.level == 0
    shell1 = cov.level == 1
    assert shell0.sum() == shell1.sum()
    assert np.allclose(0.5*cov.centers[shell0], cov.centers[shell1])
    assert np.all(cov.dists[shell0] >= 0.25 - 1e-12) and np.all(cov.dists[shell0] < 0.5)

def test_vertex_delta_tail():
    cov = cover_vertex(_quarter_vertex(), 0.25, 0.45, deltas=(0.5, 1.0))
    n_shell = int(np.sum(cov.level == 0))
    half = cov.delta_tail[0.5]
    assert half.converged and half.ratio == pytest.approx(2**-0.5)
    # radii in the last shell are below 2e-12, so each contributes < 1.5e-6
    assert half.tail_estimate < 5e-6*n_shell
    assert np.all(np.diff(half.partial) > 0)
    one = cov.delta_tail[1.0]
    assert one.converged and one.tail_estimate < 1e-10
    assert one.total == pytest.approx(cov.radii.sum())

def test_vertex_radius_distance_constant():
    c, c_hat = 0.25, 0.45
    cov = cover_vertex(_quarter_vertex(), c, c_hat, samples=0)
    C_B = radius_distance_constant(cov)
    assert math.isfinite(C_B)
    assert C_B <= max((1 + c_hat)/c, c/(1 - c_hat)) + 1e-9
    assert C_B >= 1/c

def test_vertex_covering_rejects_large_c_hat():
    with pytest.raises(ParameterError) as e:
        cover_vertex(_quarter_vertex(), 0.25, 0.6, 0.5, samples=0)
    assert e.value.name == 'c_hat'
    assert 0.5 - 1e-9 <= e.value.feasible[1] < 0.6
    with pytest.raises(ParameterError):
        cover_vertex(_quarter_vertex(), 0.4, 0.3)

def test_empty_vertex_covering():
    cov = cover_vertex(VertexNbhd(quarter_plane(), 0, 0.8), 0.25, 0.45)
    assert cov.is_empty and cov.overlap_N == 0 and cov.coverage == 1.0
    assert cov.delta_tail[0.5].total == 0.0

def test_lshape_reentrant_vertex():
    dec = decompose(l_shape())
    region = dec.region('v3')
    cov = cover_vertex(region, 0.08, 0.11, samples=20_000)
    assert cov.coverage == 1.0
    assert cov.overlap_N >= 1

def _square_vertex_edge(**kwargs):
    region = VertexEdgeNbhd(unit_square(), 0, 0, 1/8)
    params = dict(c=0.25, c_tilde=0.35, c_hat=0.45, c1=0.25, c1_hat=0.35)
    params.update(kwargs)
    return region, params

def test_vertex_edge_half_balls():
    region, params = _square_vertex_edge()
    vec = cover_vertex_edge(region, **params)
    outer = vec.outer
    assert np.allclose(outer.centers[:, 1], 0.0, atol=1e-15)
    ratios = outer.dists[1:]/outer.dists[:-1]
    assert np.allclose(ratios, ratios[0]) and ratios[0] < 1
    assert outer.dists[0] == pytest.approx(1/8)
    assert outer.kind == 'half-ball'
    assert outer.coverage == 1.0
    assert vec.containment
    assert outer.delta_tail[0.5].converged

def test_vertex_edge_subcovering():
    region, params = _square_vertex_edge()
    vec = cover_vertex_edge(region, **params)
    ref = vec.reference
    assert ref.n_samples > 9000 and ref.coverage == 1.0
    assert ref.overlap_N >= 1
    i = 3
    sub = vec.sub_covering(i)
    x_i, t_i = vec.outer.centers[i], vec.outer.dists[i]
    assert np.all(np.linalg.norm(sub.centers - x_i, axis=1) <= params['c']*t_i*(1 + 1e-12))
    assert np.allclose(sub.dists, region.edge_distance(sub.centers))
    assert np.all(np.linalg.norm(sub.centers - x_i, axis=1) + 0.35*sub.dists
                  <= params['c_tilde']*t_i*(1 + 1e-12))
    # samples of H_i are covered by its sub-covering
    rng = np.random.default_rng(2)
    r = params['c']*t_i*np.sqrt(rng.random(10_000))
    phi = math.pi*rng.random(10_000)
    pts = x_i + np.stack([r*np.cos(phi), r*np.sin(phi)], axis=1)
    pts = pts[region.edge_distance(pts) >= sub.floor]
    assert certify_coverage(sub, pts) == 1.0

def test_vertex_edge_rejects():
    region, params = _square_vertex_edge(c_hat=1.0)
    with pytest.raises(ParameterError) as e:
        cover_vertex_edge(region, **params)
    assert e.value.name == 'c_hat'
    region, params = _square_vertex_edge(c=0.1)
    with pytest.raises(ParameterError) as e:
        cover_vertex_edge(region, **params)
    assert e.value.name == 'c' and e.value.feasible[0] == pytest.approx(1/8/0.85)
    region, params = _square_vertex_edge(c_tilde=0.3)
    with pytest.raises(ParameterError) as e:
        cover_vertex_edge(region, **params)
    assert e.value.name == 'c_tilde'

def test_edge_covering():
    region = EdgeNbhd(unit_square(), 0, 1/8)
    cov = cover_edge(region, 0.25, 0.45, deltas=(1.0, 1.5))
    assert cov.coverage == 1.0 and cov.n_samples == 100_000
    assert cov.overlap_N >= 1
    # balls sit at height proportional to their radius
    assert np.allclose(cov.radii, 0.25*region.distance(cov.centers))
    assert cov.delta_tail[1.5].converged
    assert not cov.delta_tail[1.0].converged
    assert cov.floor == pytest.approx(region.width/32)

def test_edge_covering_default_reports_divergent_delta_one():
    cov = cover_edge(EdgeNbhd(unit_square(), 0, 1/8), 0.25, 0.45, samples=20_000)
    assert sorted(cov.delta_tail) == [1.0, 1.5]
    assert not cov.delta_tail[1.0].converged
    assert cov.delta_tail[1.5].converged

def test_empty_edge_covering():
    cov = cover_edge(EdgeNbhd(unit_square(), 0, 0.9, width=0.5), 0.25, 0.45)
    assert cov.is_empty and cov.coverage == 1.0

def test_covering_export(tmp_path):
    cov = cover_vertex(_quarter_vertex(), 0.25, 0.45, samples=1000)
    header = ArtifactHeader('abc123', 7)
    path = write_covering_csv(str(tmp_path/'cover.csv'), header, [cov])
    body = read_body(path)
    assert body[0] == 'kind,cx,cy,R,level'
    assert len(body) == len(cov) + 1
    kind, cx, cy, R, level = body[1].split(',')
    assert kind == 'ball' and float(R) == cov.radii[0] and level == '0'
    assert read_header(path)['seed'] == '7'
    cert = write_certificate(str(tmp_path/'cert.json'), header, {cov.label: cov.certificate()})
    assert read_header(cert)['config_hash'] == 'abc123'
