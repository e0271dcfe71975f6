import math

import numpy as np
import pytest

from mdk.errors import NonCoprime, NotInOrbit, OracleMismatch
from mdk.lattice import NormalizedTriangle, k0_group, normalize, validate_triangle
from mdk.potential import (
    branch_points,
    build_potential,
    critical_points_oracle,
    critical_values,
    k0_action,
)

P2 = NormalizedTriangle(1, 0, 1, 1, 1)


def test_build_potential_p2():
    p = build_potential(P2)
    assert (p.g, p.h, p.n) == (2, 1, 3)
    assert p.exponents == ((1, 0), (0, 1), (-1, -1))
    # W(x, y) = x + y + 1/(xy)
    assert p(2.0, 1.0) == pytest.approx(2 + 1 + 0.5)


def test_build_potential_figure_example():
    p = build_potential(NormalizedTriangle(3, 0, 1, 2, 2))
    assert (p.a, p.g, p.h) == (3, 3, 2)
    assert p.n == 11


def test_build_potential_rejects_noncoprime():
    nt = NormalizedTriangle(2, 0, 2, 2, 2)
    with pytest.raises(NonCoprime):
        build_potential(nt)


def test_newton_polygon_is_the_triangle():
    from mdk.dimer import LatticePolygon

    for abcde in [(1, 0, 1, 1, 1), (1, 0, 1, 2, 3), (3, 0, 1, 2, 2), (1, 1, 3, 2, 3)]:
        p = build_potential(NormalizedTriangle(*abcde))
        hull = LatticePolygon.hull(p.exponents)
        assert set(hull.vertices) == set(p.exponents)


# ---------------------------------------------------------------------------
# critical values
# ---------------------------------------------------------------------------


def test_p2_critical_values_exact():
    p = build_potential(P2)
    cvs = critical_values(p)
    assert len(cvs) == 3
    assert abs(cvs[0].t - 3.0) < 1e-12  # t0 = 3 from x = y, x^3 = 1
    omega = np.exp(2j * np.pi / 3)
    expected = {3 * omega**k for k in range(3)}
    for v in cvs:
        assert min(abs(v.t - e) for e in expected) < 1e-12


def test_unique_positive_real_value():
    for abcde in [(1, 0, 1, 1, 1), (1, 0, 1, 1, 2), (1, 0, 1, 2, 3), (3, 0, 1, 2, 2)]:
        cvs = critical_values(build_potential(NormalizedTriangle(*abcde)))
        positive_real = [v for v in cvs if abs(v.t.imag) < 1e-12 and v.t.real > 0]
        assert len(positive_real) == 1
        assert positive_real[0].index == 0


def test_closed_form_t6_432():
    p = build_potential(NormalizedTriangle(1, 0, 1, 2, 3))
    cvs = critical_values(p)
    assert cvs[0].modulus ** 6 == pytest.approx(432.0, rel=1e-12)


def test_oracle_p2_points():
    p = build_potential(P2)
    pts = critical_points_oracle(p)
    assert len(pts) == 3
    for x, y, t in pts:
        assert abs(x - y) < 1e-9  # critical points are (zeta, zeta)
        assert abs(x**3 - 1) < 1e-9
        assert abs(t - 3 * x) < 1e-9


def test_oracle_count_equals_n():
    for abcde in [(1, 0, 1, 1, 2), (1, 0, 1, 2, 3), (3, 0, 1, 2, 2), (1, 1, 3, 2, 3)]:
        p = build_potential(NormalizedTriangle(*abcde))
        assert len(critical_points_oracle(p)) == p.n


def test_oracle_matches_closed_form_for_primitive_triangles():
    for abcde in [(1, 0, 1, 1, 1), (1, 0, 1, 1, 2), (1, 0, 1, 2, 3), (3, 0, 1, 2, 2)]:
        p = build_potential(NormalizedTriangle(*abcde))
        cvs = critical_values(p, verify_oracle=True, tol=1e-9)
        assert len(cvs) == p.n


def test_oracle_mismatch_for_sublattice_triangle():
    # the vertices of this triangle generate an index-3 sublattice; the
    # true critical values collapse to n/3 points
    nt, _ = normalize(validate_triangle((2, 1), (-1, 1), (-1, -2)))
    p = build_potential(nt)
    with pytest.raises(OracleMismatch):
        critical_values(p, verify_oracle=True)
    oracle = critical_points_oracle(p)
    values = {complex(np.round(t, 6)) for _, _, t in oracle}
    assert len(values) == 3  # {3, 3w, 3w^2}


# ---------------------------------------------------------------------------
# branch points
# ---------------------------------------------------------------------------


def test_p2_branch_points_at_zero():
    p = build_potential(P2)
    bs = branch_points(p, 0.0)
    assert bs.count == 3
    assert bs.residual < 1e-10
    # x^3 = 4
    assert np.allclose(np.abs(bs.roots), 4 ** (1 / 3), atol=1e-12)
    args = np.sort(np.angle(bs.roots) % (2 * np.pi))
    assert np.allclose(args, [0, 2 * np.pi / 3, 4 * np.pi / 3], atol=1e-9)


def test_branch_arguments_formula_3_3_2():
    p = build_potential(NormalizedTriangle(3, 0, 1, 2, 2))
    bs = branch_points(p, 0.0)
    assert bs.count == 11
    args = np.sort(np.angle(bs.roots) % (2 * np.pi))
    expected = np.sort(np.array([(3 + 2 * n) * np.pi / 11 for n in range(1, 12)]) % (2 * np.pi))
    assert np.allclose(args, expected, atol=1e-9)


def test_branch_modulus_at_zero():
    for abcde in [(1, 0, 1, 1, 2), (1, 0, 1, 2, 3), (3, 0, 1, 2, 2)]:
        p = build_potential(NormalizedTriangle(*abcde))
        bs = branch_points(p, 0.0)
        r = (p.g**p.g / (p.c**p.c * p.e**p.e)) ** (1.0 / p.n)
        assert np.allclose(np.abs(bs.roots), r, atol=1e-9)


def test_double_root_at_critical_value():
    for abcde in [(1, 0, 1, 1, 1), (3, 0, 1, 2, 2)]:
        p = build_potential(NormalizedTriangle(*abcde))
        t0 = critical_values(p)[0].t
        bs = branch_points(p, t0)
        d = np.abs(bs.roots[:, None] - bs.roots[None, :])
        np.fill_diagonal(d, np.inf)
        i, j = np.unravel_index(np.argmin(d), d.shape)
        assert d[i, j] < 1e-5
        collision = (bs.roots[i] + bs.roots[j]) / 2
        # x^a = (h/n) t0
        assert abs(collision**p.a - (p.h / p.n) * t0) < 1e-8


# ---------------------------------------------------------------------------
# the symmetry group action on critical values
# ---------------------------------------------------------------------------


def test_k0_action_p2_example():
    p = build_potential(P2)
    cvs = critical_values(p)
    gen = k0_group(P2).generators[0]  # (1/3, 1/3)
    out = k0_action(p, gen, cvs[0])
    assert abs(out.t - 3 * np.exp(4j * np.pi / 3)) < 1e-12


def test_k0_identity_fixes_everything():
    p = build_potential(NormalizedTriangle(1, 0, 1, 2, 3))
    from fractions import Fraction

    ident = (Fraction(0), Fraction(0))
    for cv in critical_values(p):
        assert k0_action(p, ident, cv).index == cv.index


@pytest.mark.parametrize("abcde", [(1, 0, 1, 1, 1), (1, 0, 1, 1, 2), (1, 0, 1, 2, 3), (3, 0, 1, 2, 2)])
def test_k0_orbit_is_bijective(abcde):
    nt = NormalizedTriangle(*abcde)
    p = build_potential(nt)
    cvs = critical_values(p)
    group = k0_group(nt)
    assert group.order == p.n
    hits = {k0_action(p, el, cvs[0]).index for el in group.elements()}
    assert hits == set(range(p.n))


def test_k0_elements_are_fiber_symmetries():
    # for (alpha, beta) in the group, all three monomials of W pick up
    # the same phase, so (x, y) -> (alpha x, beta y) permutes fibers
    for abcde in [(1, 0, 1, 1, 2), (1, 0, 1, 2, 3), (3, 0, 1, 2, 2)]:
        nt = NormalizedTriangle(*abcde)
        p = build_potential(nt)
        for el in k0_group(nt).elements():
            alpha = np.exp(2j * np.pi * float(el[0]))
            beta = np.exp(2j * np.pi * float(el[1]))
            x, y = 0.83 + 0.4j, -0.7 + 0.99j
            lhs = p(alpha * x, beta * y)
            mult = alpha ** (-nt.d) * beta ** (-nt.e)
            assert abs(lhs - mult * p(x, y)) < 1e-9 * abs(p(x, y))


def test_k0_action_rejects_foreign_element():
    p = build_potential(P2)
    cvs = critical_values(p)
    from fractions import Fraction

    with pytest.raises(NotInOrbit):
        k0_action(p, (Fraction(1, 7), Fraction(2, 7)), cvs[0])
