"""The coamoeba of the zero fiber on the torus R^2/Z^2.

The zero fiber of the potential is carried onto the standard line
1 + X + Y = 0 by the monomial substitution with exponent matrix psi, so
its coamoeba is the psi-pullback of the standard line coamoeba: two open
triangles plus three vertex points, replicated into n fundamental copies
of each triangle.  Membership tests are analytic (a 2x2 positivity solve,
exact over the rationals), never point-in-polygon against a drawing.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lattice import Mat2, NormalizedTriangle, mat2_det, smith_normal_form

TWO_PI = 2.0 * math.pi

# vertices of the standard line coamoeba on R^2/Z^2, in units of turns
STD_VERTICES = (
    (Fraction(0), Fraction(1, 2)),
    (Fraction(1, 2), Fraction(0)),
    (Fraction(1, 2), Fraction(1, 2)),
)

# the two open triangles of the standard line coamoeba; the positive one
# is CCW, the negative one CW, each of area 1/8
STD_TRIANGLE_POS = (
    (Fraction(0), Fraction(1, 2)),
    (Fraction(1, 2), Fraction(1, 2)),
    (Fraction(1, 2), Fraction(1)),
)
STD_TRIANGLE_NEG = (
    (Fraction(1, 2), Fraction(0)),
    (Fraction(1, 2), Fraction(1, 2)),
    (Fraction(1), Fraction(1, 2)),
)


class Membership(enum.Enum):
    INTERIOR = "interior"
    VERTEX = "vertex"
    EXTERIOR = "exterior"


def frac1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


def _standard_membership_exact(t1: Fraction, t2: Fraction) -> Membership:
    f1, f2 = frac1(Fraction(t1)), frac1(Fraction(t2))
    if (f1, f2) in STD_VERTICES:
        return Membership.VERTEX
    half = Fraction(1, 2)
    if 0 < f1 < half and half < f2 < 1 and 0 < f2 - f1 < half:
        return Membership.INTERIOR
    if half < f1 < 1 and 0 < f2 < half and 0 < f1 - f2 < half:
        return Membership.INTERIOR
    return Membership.EXTERIOR


def _standard_membership_float(t1: float, t2: float, band: float = 1e-12) -> Membership:
    s1, s2 = math.sin(TWO_PI * t1), math.sin(TWO_PI * t2)
    det = math.sin(TWO_PI * (t2 - t1))
    if abs(det) <= band:
        # non-transverse directions: only the three vertex points qualify
        f1, f2 = t1 % 1.0, t2 % 1.0
        for v1, v2 in STD_VERTICES:
            d1 = min(abs(f1 - float(v1)), 1.0 - abs(f1 - float(v1)))
            d2 = min(abs(f2 - float(v2)), 1.0 - abs(f2 - float(v2)))
            if d1 < 1e-9 and d2 < 1e-9:
                return Membership.VERTEX
        return Membership.EXTERIOR
    r1 = -s2 / det
    r2 = s1 / det
    if r1 > band and r2 > band:
        return Membership.INTERIOR
    return Membership.EXTERIOR


def standard_membership(point) -> Membership:
    """Classify a torus point against the coamoeba of 1 + x + y = 0.

    A point is interior iff -1 lies strictly inside the open cone spanned
    by the two unit directions, i.e. the 2x2 system
    r1 e^(2 pi i t1) + r2 e^(2 pi i t2) = -1 has a transverse solution
    with r1, r2 > 0.  Exact-rational inputs are decided exactly.
    """
    t1, t2 = point
    if isinstance(t1, Fraction) and isinstance(t2, Fraction):
        return _standard_membership_exact(t1, t2)
    return _standard_membership_float(float(t1), float(t2))


def apply_psi(nt: NormalizedTriangle, point):
    """psi acting on a column vector of rotation numbers."""
    (p, q), (r, s) = nt.psi
    t1, t2 = point
    return (p * t1 + q * t2, r * t1 + s * t2)


def coamoeba_membership(nt: NormalizedTriangle, point) -> Membership:
    """Membership in the coamoeba of the zero fiber: the psi-pullback."""
    return standard_membership(apply_psi(nt, point))


@dataclass(frozen=True)
class TorusTriangle:
    """One fundamental copy of a standard coamoeba triangle.

    ``vertices`` are exact rationals in a consistent affine position (the
    triangle is tiny and may straddle the unit square; its barycenter is
    normalized to [0,1)^2).  ``orientation`` is +1 for copies of the
    positively oriented standard triangle, -1 otherwise.
    """

    vertices: tuple[tuple[Fraction, Fraction], ...]
    orientation: int
    shift_class: tuple[int, int]

    @property
    def barycenter(self) -> tuple[Fraction, Fraction]:
        xs = sum(v[0] for v in self.vertices) / 3
        ys = sum(v[1] for v in self.vertices) / 3
        return (xs, ys)

    @property
    def signed_area(self) -> Fraction:
        (x1, y1), (x2, y2), (x3, y3) = self.vertices
        return ((x2 - x1) * (y3 - y1) - (y2 - y1) * (x3 - x1)) / 2

    def contains(self, point: tuple[Fraction, Fraction], margin: float = 0.0) -> bool:
        """Exact strict point-in-triangle test modulo Z^2.

        With ``margin`` > 0 the point must lie inside with all normalized
        barycentric coordinates above the margin (a shrunken triangle).
        """
        px, py = Fraction(point[0]), Fraction(point[1])
        bx, by = self.barycenter
        # translate the query near the stored representative
        px += round(bx - px)
        py += round(by - py)
        (x1, y1), (x2, y2), (x3, y3) = self.vertices
        area2 = self.signed_area * 2
        sgn = 1 if area2 > 0 else -1
        d1 = ((x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)) * sgn
        d2 = ((x3 - x2) * (py - y2) - (y3 - y2) * (px - x2)) * sgn
        d3 = ((x1 - x3) * (py - y3) - (y1 - y3) * (px - x3)) * sgn
        cut = abs(area2) * Fraction(margin).limit_denominator(10**6)
        return d1 > cut and d2 > cut and d3 > cut

    def to_json(self) -> dict:
        return {
            "vertices": [[float(v[0]), float(v[1])] for v in self.vertices],
            "orientation": self.orientation,
            "shift_class": list(self.shift_class),
        }


def _psi_inverse_times(nt: NormalizedTriangle, v: tuple[Fraction, Fraction]):
    """psi^{-1} v, exact: psi^{-1} = (1/n) ((c+e, -e), (-(b+d), a+d))."""
    n = nt.n
    x = (nt.c + nt.e) * v[0] - nt.e * v[1]
    y = -(nt.b + nt.d) * v[0] + (nt.a + nt.d) * v[1]
    return (Fraction(x, n) if not isinstance(x, Fraction) else x / n,
            Fraction(y, n) if not isinstance(y, Fraction) else y / n)


def shift_classes(nt: NormalizedTriangle) -> list[tuple[int, int]]:
    """A transversal of Z^2 / psi Z^2 (n classes), deterministic order."""
    u, d, _ = smith_normal_form(nt.psi)
    d1, d2 = d[0][0], d[1][1]
    uinv = _int_inverse_2x2(u)
    out = []
    for i in range(d1):
        for j in range(d2):
            m1 = uinv[0][0] * i + uinv[0][1] * j
            m2 = uinv[1][0] * i + uinv[1][1] * j
            out.append((m1, m2))
    return out


def _int_inverse_2x2(m) -> Mat2:
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    assert det in (1, -1)
    return (
        (m[1][1] * det, -m[0][1] * det),
        (-m[1][0] * det, m[0][0] * det),
    )


def _normalize_affine(verts):
    """Translate a rational triangle so its barycenter lies in [0,1)^2."""
    bx = sum(v[0] for v in verts) / 3
    by = sum(v[1] for v in verts) / 3
    sx = bx.numerator // bx.denominator
    sy = by.numerator // by.denominator
    return tuple((v[0] - sx, v[1] - sy) for v in verts)


def fundamental_triangles(nt: NormalizedTriangle) -> list[TorusTriangle]:
    """The 2n open triangles of the coamoeba, n copies per orientation.

    Copy (m, T) is the affine triangle psi^{-1}(T + m) for m running over
    a transversal of Z^2 / psi Z^2; the linear pullback divides each
    standard triangle of area 1/8 into nothing - it maps it to a single
    triangle of area 1/(8n), and distinct shifts give disjoint copies.
    """
    out = []
    for shift in shift_classes(nt):
        for orientation, std in ((1, STD_TRIANGLE_POS), (-1, STD_TRIANGLE_NEG)):
            verts = tuple(
                _psi_inverse_times(nt, (v[0] + shift[0], v[1] + shift[1])) for v in std
            )
            out.append(
                TorusTriangle(
                    vertices=_normalize_affine(verts),
                    orientation=orientation,
                    shift_class=shift,
                )
            )
    return out


@dataclass(frozen=True)
class Ray:
    """A constant-argument ray in the x-plane covering a coamoeba vertex.

    ``turn`` is the exact argument in units of full turns.  Rays covering
    the vertex (1/2, 0) start at the branch points of the t = 0 covering
    (``r_start`` equals the branch-point modulus); the other two families
    start at the origin (``r_start`` 0).
    """

    vertex_class: tuple[Fraction, Fraction]
    turn: Fraction
    r_start: float

    @property
    def base_point(self) -> complex:
        angle = TWO_PI * float(self.turn)
        return self.r_start * complex(math.cos(angle), math.sin(angle))

    def to_json(self) -> dict:
        return {
            "vertex_class": [str(self.vertex_class[0]), str(self.vertex_class[1])],
            "turn": [self.turn.numerator, self.turn.denominator],
            "r_start": self.r_start,
        }


def vertex_rays(nt: NormalizedTriangle) -> list[Ray]:
    """The 3n x-plane rays over the three coamoeba vertex classes.

    The vertex preimages project to x^n = T^(c+e) / (-1-T)^e over the
    three real intervals T > 0, -1 < T < 0 and T < -1.  Sign analysis of
    that rational function puts the first two families on full rays from
    the origin with arguments ((e + 2k) pi)/n and ((c + 2k) pi)/n, and the
    third on half lines of argument ((g + 2k) pi)/n starting at the branch
    points of the t = 0 covering, whose common modulus is
    (g^g / (c^c e^e))^(1/n).
    """
    c, e, g, n = nt.c, nt.e, nt.g, nt.n
    r_branch = math.exp(
        (g * math.log(g) - c * math.log(c) - e * math.log(e)) / n
    )
    rays = []
    families = (
        ((Fraction(0), Fraction(1, 2)), e, 0.0),       # T > 0
        ((Fraction(1, 2), Fraction(1, 2)), c, 0.0),    # -1 < T < 0
        ((Fraction(1, 2), Fraction(0)), g, r_branch),  # T < -1
    )
    for vertex, parity, r_start in families:
        for k in range(n):
            turn = frac1(Fraction(parity + 2 * k, 2 * n))
            rays.append(Ray(vertex_class=vertex, turn=turn, r_start=r_start))
    return rays


def sample_fiber_arguments(
    nt: NormalizedTriangle, count: int, seed: int = 0
) -> np.ndarray:
    """Argument projections of random points on the zero fiber.

    Draws ``count`` random x values (log-uniform modulus, uniform angle),
    solves the fiber equation for all y over each x, and returns the
    (count * (c+e), 2) array of argument pairs in units of turns.  Used as
    a sampling oracle against the membership tests.
    """
    from .potential import Potential

    rng = np.random.default_rng(seed)
    pot = Potential(nt)
    out = []
    for _ in range(count):
        r = math.exp(rng.uniform(-0.5, 0.5))
        phi = rng.uniform(0.0, TWO_PI)
        x = r * complex(math.cos(phi), math.sin(phi))
        ys = np.roots(pot.fiber_coeffs(x, 0.0)[::-1])
        for y in ys:
            out.append(
                (
                    (math.atan2(x.imag, x.real) / TWO_PI) % 1.0,
                    (math.atan2(y.imag, y.real) / TWO_PI) % 1.0,
                )
            )
    return np.array(out)
