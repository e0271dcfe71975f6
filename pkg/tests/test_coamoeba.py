from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdk.coamoeba import (
    Membership,
    STD_VERTICES,
    coamoeba_membership,
    fundamental_triangles,
    sample_fiber_arguments,
    standard_membership,
    vertex_rays,
)
from mdk.lattice import NormalizedTriangle
from mdk.potential import branch_points, build_potential

P2 = NormalizedTriangle(1, 0, 1, 1, 1)

SUITE = [
    NormalizedTriangle(1, 0, 1, 1, 1),
    NormalizedTriangle(1, 0, 1, 1, 2),
    NormalizedTriangle(1, 0, 1, 2, 3),
    NormalizedTriangle(1, 0, 2, 3, 3),
    NormalizedTriangle(1, 1, 3, 2, 3),
]


def rationals():
    return st.fractions(min_value=-2, max_value=2, max_denominator=64)


# ---------------------------------------------------------------------------
# standard membership
# ---------------------------------------------------------------------------


def test_standard_membership_examples():
    assert standard_membership((F(1, 4), F(5, 8))) == Membership.INTERIOR
    assert standard_membership((F(0), F(1, 2))) == Membership.VERTEX
    assert standard_membership((F(0), F(0))) == Membership.EXTERIOR
    # open triangle edges are not part of the coamoeba
    assert standard_membership((F(1, 4), F(3, 4))) == Membership.EXTERIOR


def test_standard_membership_float_matches_exact():
    rng = np.random.default_rng(3)
    for _ in range(500):
        q = (F(int(rng.integers(0, 97)), 97), F(int(rng.integers(0, 97)), 97))
        exact = standard_membership(q)
        approx = standard_membership((float(q[0]), float(q[1])))
        assert exact == approx


def test_vertices_are_the_only_boundary_members():
    for v in STD_VERTICES:
        assert standard_membership(v) == Membership.VERTEX


@settings(max_examples=300, deadline=None)
@given(rationals(), rationals())
def test_antipodal_symmetry(t1, t2):
    a = standard_membership((t1, t2))
    b = standard_membership((-t1, -t2))
    assert a == b


@settings(max_examples=200, deadline=None)
@given(rationals(), rationals())
def test_interior_certificate(t1, t2):
    # whenever the test says interior, the 2x2 positive solve must hold
    if standard_membership((t1, t2)) == Membership.INTERIOR:
        u = np.exp(2j * np.pi * float(t1))
        v = np.exp(2j * np.pi * float(t2))
        m = np.array([[u.real, v.real], [u.imag, v.imag]])
        r = np.linalg.solve(m, [-1.0, 0.0])
        assert r[0] > 0 and r[1] > 0


# ---------------------------------------------------------------------------
# pullback membership and triangles
# ---------------------------------------------------------------------------


@settings(max_examples=200, deadline=None)
@given(rationals(), rationals())
def test_pullback_definition(t1, t2):
    from mdk.coamoeba import apply_psi

    nt = NormalizedTriangle(1, 0, 1, 2, 3)
    direct = coamoeba_membership(nt, (t1, t2))
    assert direct == standard_membership(apply_psi(nt, (t1, t2)))


def test_p2_exterior_origin():
    assert coamoeba_membership(P2, (F(0), F(0))) == Membership.EXTERIOR


@pytest.mark.parametrize("nt", SUITE, ids=lambda t: str(t.abcde))
def test_fundamental_triangle_count_and_area(nt):
    tris = fundamental_triangles(nt)
    assert len(tris) == 2 * nt.n
    pos = [t for t in tris if t.orientation > 0]
    neg = [t for t in tris if t.orientation < 0]
    assert len(pos) == len(neg) == nt.n
    for t in tris:
        assert t.signed_area == F(t.orientation, 8 * nt.n)
    total = sum(abs(t.signed_area) for t in tris)
    assert total == F(1, 4)


@pytest.mark.parametrize("nt", SUITE, ids=lambda t: str(t.abcde))
def test_triangle_barycenters_agree_with_membership(nt):
    tris = fundamental_triangles(nt)
    barys = set()
    for t in tris:
        b = t.barycenter
        assert t.contains(b)
        assert coamoeba_membership(nt, b) == Membership.INTERIOR
        barys.add((b[0] % 1, b[1] % 1))
    # 2n distinct open triangles
    assert len(barys) == 2 * nt.n
    # no triangle contains another's barycenter
    for t in tris:
        inside = [u for u in tris if u.contains(t.barycenter)]
        assert len(inside) == 1


@pytest.mark.parametrize("nt", SUITE, ids=lambda t: str(t.abcde))
def test_triangle_vertices_are_vertex_preimages(nt):
    from mdk.coamoeba import apply_psi, frac1

    for t in fundamental_triangles(nt):
        for v in t.vertices:
            image = apply_psi(nt, v)
            image = (frac1(image[0]), frac1(image[1]))
            assert image in STD_VERTICES


def test_fiber_sampling_oracle():
    # 1000 random fiber points project to interior or vertex, never exterior
    for nt in [P2, NormalizedTriangle(1, 0, 1, 2, 3)]:
        args = sample_fiber_arguments(nt, 1000 // nt.g, seed=11)
        for t1, t2 in args:
            assert standard_membership(
                (
                    float((nt.a + nt.d) * t1 + nt.e * t2),
                    float((nt.b + nt.d) * t1 + (nt.c + nt.e) * t2),
                )
            ) != Membership.EXTERIOR


# ---------------------------------------------------------------------------
# vertex rays
# ---------------------------------------------------------------------------


def test_p2_ray_arguments():
    rays = vertex_rays(P2)
    assert len(rays) == 9
    t_pos = sorted(r.turn for r in rays if r.vertex_class == (F(0), F(1, 2)))
    assert t_pos == [F(1, 6), F(1, 2), F(5, 6)]  # arguments (2k+1) pi / 3


@pytest.mark.parametrize("nt", SUITE, ids=lambda t: str(t.abcde))
def test_ray_counts_and_anchors(nt):
    rays = vertex_rays(nt)
    assert len(rays) == 3 * nt.n
    by_class = {}
    for r in rays:
        by_class.setdefault(r.vertex_class, []).append(r)
    assert all(len(v) == nt.n for v in by_class.values())
    # the (1/2, 0) family starts at the branch points of the t=0 covering
    anchored = by_class[(F(1, 2), F(0))]
    assert all(r.r_start > 0 for r in anchored)
    others = by_class[(F(0), F(1, 2))] + by_class[(F(1, 2), F(1, 2))]
    assert all(r.r_start == 0 for r in others)


def test_branch_anchored_rays_match_branch_points():
    p = build_potential(P2)
    bs = branch_points(p, 0.0)
    anchored = [r for r in vertex_rays(P2) if r.r_start > 0]
    for r in anchored:
        base = r.base_point
        assert min(abs(base - z) for z in bs.roots) < 1e-9
