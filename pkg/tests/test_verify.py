from fractions import Fraction

import numpy as np
import pytest

from mdk.dimer import build_hexagonal_dimer
from mdk.errors import NotBijective, SheetTrackingFailure
from mdk.lattice import NormalizedTriangle, k0_group, normalize, validate_triangle
from mdk.potential import build_potential, critical_values
from mdk.tracing import matching_path
from mdk.verify import (
    TorusCurve,
    compute_cycles,
    curve_polyline_hausdorff,
    cycle_face_bijection,
    face_boundary_polyline,
    intersection_counts,
    project_cycle,
    verify_conjecture,
)

P2 = NormalizedTriangle(1, 0, 1, 1, 1)


@pytest.fixture(scope="module")
def p2_cycles():
    p = build_potential(P2)
    return p, compute_cycles(p)


def test_projected_cycle_closes_with_zero_winding(p2_cycles):
    _, cycles = p2_cycles
    for c in cycles:
        assert c.curve.closure_defect() < 1e-9
        assert c.curve.winding() == (0, 0)


def test_cycle_visits_six_triangles(p2_cycles):
    _, cycles = p2_cycles
    g = build_hexagonal_dimer(P2)
    visited = set()
    for x, y in cycles[0].curve.points:
        fx = Fraction(x).limit_denominator(10**9)
        fy = Fraction(y).limit_denominator(10**9)
        for v in g.nodes:
            if v.triangle.contains((fx, fy)):
                visited.add(v.id)
    assert len(visited) == 6


def test_cycle_passes_through_its_face_vias(p2_cycles):
    p, cycles = p2_cycles
    g = build_hexagonal_dimer(P2)
    bij = cycle_face_bijection([c.curve for c in cycles], g)
    for ci, cyc in enumerate(cycles):
        boundary = {d[0] for d in g.faces[bij[ci]]}
        pts = cyc.curve.points
        for eid in boundary:
            e = g.edges[eid]
            v = np.array([float(e.via[0]) % 1, float(e.via[1]) % 1])
            d = pts - v
            d -= np.round(d)
            assert np.hypot(d[:, 0], d[:, 1]).min() < 1e-3


def test_bijection_p2(p2_cycles):
    _, cycles = p2_cycles
    g = build_hexagonal_dimer(P2)
    bij = cycle_face_bijection([c.curve for c in cycles], g)
    assert sorted(bij.keys()) == [0, 1, 2]
    assert sorted(bij.values()) == [0, 1, 2]


def test_bijection_negative_control(p2_cycles):
    _, cycles = p2_cycles
    g = build_hexagonal_dimer(P2)
    curves = [c.curve for c in cycles]
    curves[1] = curves[1].translated((0.37, 0.11))
    with pytest.raises(NotBijective):
        cycle_face_bijection(curves, g)


def test_intersection_matrix_p2(p2_cycles):
    p, cycles = p2_cycles
    g = build_hexagonal_dimer(P2)
    bij = cycle_face_bijection([c.curve for c in cycles], g)
    counts = intersection_counts(g, bij, cycles, p)
    assert counts.tolist() == [[0, 3, 3], [3, 0, 3], [3, 3, 0]]
    assert np.array_equal(counts, counts.T)
    assert np.all(np.diag(counts) == 0)


def test_hausdorff_band_is_stable_under_refinement():
    p = build_potential(P2)
    cv = critical_values(p)[0]
    g = build_hexagonal_dimer(P2)
    coarse = project_cycle(p, matching_path(p, cv), step=0.02)
    fine = project_cycle(p, matching_path(p, cv, steps=256), step=0.005)
    boundaries = [face_boundary_polyline(g, fi) for fi in range(g.n_faces)]
    d_coarse = min(curve_polyline_hausdorff(coarse.curve, b) for b in boundaries)
    d_fine = min(curve_polyline_hausdorff(fine.curve, b) for b in boundaries)
    # the band is honest curve geometry, not discretization noise
    assert abs(d_coarse - d_fine) < 5e-3
    assert d_fine < 0.12


def test_k0_equivariance_of_projected_cycles(p2_cycles):
    # the cycle over the rotated critical value is the torus translate of
    # the base cycle by the group element transporting the fibers
    p, cycles = p2_cycles
    group = k0_group(P2)
    base = cycles[0].curve
    for el in group.elements():
        # fiber transport multiplier is alpha^-d beta^-e
        rot = (-(p.d * el[0] + p.e * el[1])) % 1
        n_index = int(rot * p.n) % p.n
        target = cycles[n_index].curve
        moved = base.translated((float(el[0]), float(el[1])))
        poly = np.vstack([target.lift, target.lift[:1]])
        from mdk.verify import _segment_distances

        d1 = _segment_distances(moved.points, poly).max()
        assert d1 < 5e-3


def test_sheet_tracking_rejects_degenerate_rays():
    nt, _ = normalize(validate_triangle((2, 1), (-1, 1), (-1, -2)))
    p = build_potential(nt)
    cvs = critical_values(p, verify_oracle=False)
    good, bad = 0, 0
    for cv in cvs:
        try:
            project_cycle(p, matching_path(p, cv))
            good += 1
        except SheetTrackingFailure:
            bad += 1
    # only the rays ending on honest branch points of the t=0 covering lift
    assert good == 3
    assert bad == 6


def test_verify_conjecture_p2():
    rep = verify_conjecture(validate_triangle((1, 0), (0, 1), (-1, -1)))
    assert rep.overall
    assert len(rep.bullets) == 6
    names = [b.name for b in rep.bullets]
    assert names == [
        "cycles_faces_bijection",
        "edges_are_intersections",
        "nodes_are_triangles",
        "node_color_vs_orientation",
        "image_is_consistent_dimer",
        "characteristic_polygon_is_triangle",
    ]


def test_verify_conjecture_rejects_noncoprime():
    from mdk.errors import NonCoprime

    with pytest.raises(NonCoprime):
        verify_conjecture(validate_triangle((2, 0), (0, 2), (-2, -2)))


def test_report_json_shape():
    rep = verify_conjecture(validate_triangle((1, 0), (0, 1), (-1, -1)))
    doc = rep.to_json()
    assert set(doc) == {"triangle", "bullets", "overall"}
    assert all(set(b) == {"name", "pass", "detail"} for b in doc["bullets"])
    assert doc["overall"] is True
