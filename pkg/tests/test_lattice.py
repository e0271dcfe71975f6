import itertools
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from mdk.errors import Degenerate, NonCoprime, OriginNotInterior
from mdk.lattice import (
    IDENTITY_2X2,
    NormalizedTriangle,
    cross,
    invariant_factors,
    k0_group,
    mat2_apply,
    mat2_det,
    mat2_mul,
    normalize,
    smith_normal_form,
    stack_weights,
    torus_kernel,
    validate_triangle,
)

P2 = [(1, 0), (0, 1), (-1, -1)]

SUITE = [
    [(1, 0), (0, 1), (-1, -1)],
    [(1, 0), (0, 1), (-1, -2)],
    [(1, 0), (0, 1), (-2, -3)],
    [(3, 0), (0, 1), (-2, -2)],
    [(2, 1), (-1, 1), (-1, -2)],
]


def coords():
    return st.integers(min_value=-6, max_value=6)


def triangles():
    return st.tuples(
        st.tuples(coords(), coords()),
        st.tuples(coords(), coords()),
        st.tuples(coords(), coords()),
    )


def valid_triangle_or_assume(vs):
    try:
        return validate_triangle(*vs)
    except (Degenerate, OriginNotInterior):
        assume(False)


# ---------------------------------------------------------------------------
# validate_triangle
# ---------------------------------------------------------------------------


def test_validate_p2_keeps_ccw_order():
    tri = validate_triangle(*P2)
    assert tri.vertices == ((1, 0), (0, 1), (-1, -1))


def test_validate_rejects_origin_outside():
    with pytest.raises(OriginNotInterior):
        validate_triangle((1, 0), (0, 1), (1, 1))


def test_validate_rejects_collinear():
    with pytest.raises(Degenerate):
        validate_triangle((1, 0), (2, 0), (3, 0))


def test_validate_rejects_origin_on_boundary():
    with pytest.raises(OriginNotInterior):
        validate_triangle((1, 0), (-1, 0), (0, 1))


def test_validate_reorders_cw_input():
    tri = validate_triangle((1, 0), (-1, -1), (0, 1))
    assert tri.twice_area > 0
    assert cross(tri.v1, tri.v2) > 0


# ---------------------------------------------------------------------------
# normalize
# ---------------------------------------------------------------------------


def test_normalize_p2_is_identity():
    nt, u = normalize(validate_triangle(*P2))
    assert nt.abcde == (1, 0, 1, 1, 1)
    assert u == IDENTITY_2X2


def test_normalize_cyclic_relabel_same_tuple():
    nt, u = normalize(validate_triangle((0, 1), (-1, -1), (1, 0)))
    assert nt.abcde == (1, 0, 1, 1, 1)
    assert mat2_det(u) == 1


def test_normalize_2_3_example():
    nt, u = normalize(validate_triangle((1, 0), (0, 1), (-2, -3)))
    assert nt.abcde == (1, 0, 1, 2, 3)
    assert (nt.g, nt.h, nt.n) == (4, 2, 6)
    tri = validate_triangle((1, 0), (0, 1), (-2, -3))
    # h = cd - be equals twice-area contribution cross(v2, v3) and
    # n equals the classic twice-area formula.
    (x1, y1), (x2, y2), (x3, y3) = tri.vertices
    area2 = abs(x1 * (y2 - y3) + x2 * (y3 - y1) + x3 * (y1 - y2))
    assert nt.n == area2 == 6


def test_normalize_noncoprime_rejected():
    with pytest.raises(NonCoprime):
        normalize(validate_triangle((2, 0), (0, 2), (-2, -2)))


@settings(max_examples=150, deadline=None)
@given(triangles())
def test_normalize_matches_twice_area(vs):
    tri = valid_triangle_or_assume(vs)
    try:
        nt, u = normalize(tri)
    except NonCoprime:
        assume(False)
    assert nt.n == tri.twice_area
    assert nt.h >= 1
    assert mat2_det(u) == 1
    assert sorted(mat2_apply(u, v) for v in tri.vertices) == sorted(nt.vertices)
    # n = det(psi) = ps - rq
    assert mat2_det(nt.psi) == nt.n


@settings(max_examples=80, deadline=None)
@given(triangles(), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.integers(0, 2))
def test_normalize_invariant_under_unimodular_maps(vs, p, q, r, rot):
    tri = valid_triangle_or_assume(vs)
    # Build a random SL2(Z) element from shears ((1,p),(0,1)), ((1,0),(q,1)).
    m = mat2_mul(((1, p), (0, 1)), mat2_mul(((1, 0), (q, 1)), ((1, r), (0, 1))))
    assert mat2_det(m) == 1
    verts = tri.vertices
    moved = [mat2_apply(m, verts[(i + rot) % 3]) for i in range(3)]
    tri2 = valid_triangle_or_assume(moved)
    try:
        nt1, _ = normalize(tri)
        nt2, _ = normalize(tri2)
    except NonCoprime:
        assume(False)
    assert nt1.abcde == nt2.abcde


# ---------------------------------------------------------------------------
# smith_normal_form
# ---------------------------------------------------------------------------


def check_snf(m):
    u, d, v = smith_normal_form(m)
    rows, cols = len(m), len(m[0])
    assert abs(mat_det(u)) == 1 and abs(mat_det(v)) == 1
    prod = mat_mul(mat_mul(u, [list(r) for r in m]), v)
    assert prod == d
    diag = [d[i][i] for i in range(min(rows, cols))]
    for i in range(rows):
        for j in range(cols):
            if i != j:
                assert d[i][j] == 0
    for x, y in zip(diag, diag[1:]):
        assert x >= 0 and y >= 0
        if x:
            assert y % x == 0
        else:
            assert y == 0
    return diag


def mat_mul(a, b):
    return [
        [sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
        for i in range(len(a))
    ]


def mat_det(m):
    if len(m) == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if len(m) == 3:
        return (
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        )
    raise ValueError


def test_snf_2x2_examples():
    assert check_snf([[2, 1], [1, 2]]) == [1, 3]
    assert check_snf([[1, 0], [0, 1]]) == [1, 1]
    assert check_snf([[3, 2], [3, 4]]) == [1, 6]


def test_snf_identity_transforms():
    u, d, v = smith_normal_form([[1, 0], [0, 1]])
    assert d == [[1, 0], [0, 1]]


def test_snf_3x2():
    diag = check_snf([[2, 0], [0, 2], [2, 2]])
    assert diag == [2, 2]


@settings(max_examples=200, deadline=None)
@given(st.lists(st.lists(st.integers(-9, 9), min_size=2, max_size=2), min_size=2, max_size=3))
def test_snf_random(m):
    check_snf(m)


# ---------------------------------------------------------------------------
# stack_weights
# ---------------------------------------------------------------------------


def test_stack_weights_p2():
    sd = stack_weights(validate_triangle(*P2))
    assert sd.weights == (1, 1, 1)
    assert sd.surjective
    assert sd.gcd_abc == 1
    assert sd.k2.invariant_factors == ()
    assert sd.k2.order == 1


def test_stack_weights_2_3():
    sd = stack_weights(validate_triangle((1, 0), (0, 1), (-2, -3)))
    assert sd.weights == (2, 3, 1)
    assert sd.surjective


def test_stack_weights_doubled_p2():
    sd = stack_weights(validate_triangle((2, 0), (0, 2), (-2, -2)))
    assert sd.weights == (1, 1, 1)
    assert not sd.surjective
    assert sd.k2.invariant_factors == (2, 2)
    assert sd.k2.order == 4


@settings(max_examples=150, deadline=None)
@given(triangles())
def test_stack_weights_relation_and_positivity(vs):
    tri = valid_triangle_or_assume(vs)
    sd = stack_weights(tri)
    w = sd.weights
    assert all(x > 0 for x in w)
    assert gcd(gcd(w[0], w[1]), w[2]) == 1
    sx = sum(wi * v[0] for wi, v in zip(w, tri.vertices))
    sy = sum(wi * v[1] for wi, v in zip(w, tri.vertices))
    assert (sx, sy) == (0, 0)
    assert sd.surjective == (sd.gcd_abc == 1)
    assert sd.k2.order == sd.gcd_abc


# ---------------------------------------------------------------------------
# k0_group
# ---------------------------------------------------------------------------


def test_k0_p2():
    nt = NormalizedTriangle(1, 0, 1, 1, 1)
    k0 = k0_group(nt)
    assert k0.invariant_factors == (3,)
    assert k0.order == 3
    (t1, t2) = k0.generators[0]
    # psi rows: (a+d, e) and (b+d, c+e)
    assert (2 * t1 + 1 * t2).denominator == 1
    assert (1 * t1 + 2 * t2).denominator == 1


def test_k0_orders():
    assert k0_group(NormalizedTriangle(1, 0, 1, 2, 3)).order == 6
    assert k0_group(NormalizedTriangle(1, 0, 1, 2, 3)).invariant_factors == (6,)
    assert k0_group(NormalizedTriangle(3, 0, 1, 2, 2)).order == 11
    assert k0_group(NormalizedTriangle(3, 0, 1, 2, 2)).invariant_factors == (11,)


@settings(max_examples=120, deadline=None)
@given(triangles())
def test_k0_order_is_n_and_generators_exact(vs):
    tri = valid_triangle_or_assume(vs)
    try:
        nt, _ = normalize(tri)
    except NonCoprime:
        assume(False)
    k0 = k0_group(nt)
    assert k0.order == nt.n
    psi = nt.psi
    for gen, order in zip(k0.generators, k0.invariant_factors):
        # generator satisfies psi . theta integral
        for row in psi:
            val = row[0] * gen[0] + row[1] * gen[1]
            assert val.denominator == 1
        # exact order check
        for mult in range(1, order):
            p1 = (mult * gen[0]) % 1
            p2 = (mult * gen[1]) % 1
            assert (p1, p2) != (Fraction(0), Fraction(0))
        assert ((order * gen[0]) % 1, (order * gen[1]) % 1) == (Fraction(0), Fraction(0))
    # element enumeration is the whole group, no repeats
    elems = k0.elements()
    assert len(set(elems)) == nt.n


def test_torus_kernel_invariant_factor_divisibility():
    g = torus_kernel(((2, 0), (0, 4)))
    assert g.invariant_factors == (2, 4)
    assert g.order == 8


def test_invariant_factors_helper():
    assert invariant_factors([[2, 0], [0, 4]]) == [2, 4]
    assert invariant_factors([[1, 0], [0, 1]]) == []


# ---------------------------------------------------------------------------
# suite sanity
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("verts", SUITE)
def test_suite_normalizes(verts):
    tri = validate_triangle(*verts)
    nt, u = normalize(tri)
    assert nt.n == tri.twice_area
    assert gcd(nt.a, nt.h) == 1
    assert k0_group(nt).order == nt.n
