"""Exact integer-lattice geometry for origin-interior triangles.

Everything in this module is exact: plain Python integers and
``fractions.Fraction``, no floating point.  It provides triangle
validation, the canonical SL2(Z) normal form Conv{(a,0),(b,c),(-d,-e)},
Smith normal forms with transformation matrices, quotient-stack weight
data, and the finite symmetry group attached to a normalized triangle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import Degenerate, NonCoprime, OriginNotInterior

Vec = tuple[int, int]
Mat2 = tuple[tuple[int, int], tuple[int, int]]

IDENTITY_2X2: Mat2 = ((1, 0), (0, 1))


def cross(u: Vec, v: Vec) -> int:
    return u[0] * v[1] - u[1] * v[0]


def mat2_mul(m: Mat2, n: Mat2) -> Mat2:
    return (
        (m[0][0] * n[0][0] + m[0][1] * n[1][0], m[0][0] * n[0][1] + m[0][1] * n[1][1]),
        (m[1][0] * n[0][0] + m[1][1] * n[1][0], m[1][0] * n[0][1] + m[1][1] * n[1][1]),
    )


def mat2_apply(m: Mat2, v) -> tuple:
    return (m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1])


def mat2_det(m: Mat2) -> int:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def mat2_inv(m: Mat2) -> Mat2:
    """Inverse of a determinant +-1 integer matrix."""
    det = mat2_det(m)
    if det not in (1, -1):
        raise ValueError(f"matrix is not unimodular (det={det})")
    return (
        (m[1][1] * det, -m[0][1] * det),
        (-m[1][0] * det, m[0][0] * det),
    )


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


@dataclass(frozen=True)
class LatticeTriangle:
    """A lattice triangle with the origin strictly inside, vertices CCW."""

    v1: Vec
    v2: Vec
    v3: Vec

    @property
    def vertices(self) -> tuple[Vec, Vec, Vec]:
        return (self.v1, self.v2, self.v3)

    @property
    def twice_area(self) -> int:
        return cross(self.v1, self.v2) + cross(self.v2, self.v3) + cross(self.v3, self.v1)

    def to_json(self) -> list[list[int]]:
        return [list(v) for v in self.vertices]


def validate_triangle(v1, v2, v3) -> LatticeTriangle:
    """Validate three integer pairs as an origin-interior lattice triangle.

    The vertices are reordered to counterclockwise if given clockwise
    (keeping the first vertex first).  Raises ``Degenerate`` for collinear
    input and ``OriginNotInterior`` if the origin is not strictly inside.
    """
    vs = [(int(v[0]), int(v[1])) for v in (v1, v2, v3)]
    if len(set(vs)) != 3:
        raise Degenerate(f"vertices are not pairwise distinct: {vs}")
    a, b, c = vs
    area2 = cross(a, b) + cross(b, c) + cross(c, a)
    if area2 == 0:
        raise Degenerate(f"vertices are collinear: {vs}")
    if area2 < 0:
        b, c = c, b
    tri = LatticeTriangle(a, b, c)
    crosses = (cross(tri.v1, tri.v2), cross(tri.v2, tri.v3), cross(tri.v3, tri.v1))
    if any(x <= 0 for x in crosses):
        raise OriginNotInterior(
            f"origin is not strictly interior (cyclic cross products {crosses})"
        )
    return tri


@dataclass(frozen=True)
class NormalizedTriangle:
    """Normal form data (a, b, c, d, e) for Conv{(a,0), (b,c), (-d,-e)}.

    ``transform`` is the determinant +1 integer matrix carrying the
    validated input triangle onto the normal form.  Derived quantities:
    g = c + e, h = c*d - b*e, and n = a*g + h, which equals twice the
    Euclidean area of the triangle.
    """

    a: int
    b: int
    c: int
    d: int
    e: int
    transform: Mat2 = IDENTITY_2X2

    def __post_init__(self):
        if min(self.a, self.c, self.d, self.e) < 1 or self.b < 0:
            raise ValueError(f"invalid normal form {self.abcde}")
        if self.h < 1:
            raise ValueError(f"h = c*d - b*e = {self.h} < 1; origin not interior")

    @property
    def abcde(self) -> tuple[int, int, int, int, int]:
        return (self.a, self.b, self.c, self.d, self.e)

    @property
    def g(self) -> int:
        return self.c + self.e

    @property
    def h(self) -> int:
        return self.c * self.d - self.b * self.e

    @property
    def n(self) -> int:
        """Twice the Euclidean area; also det(psi)."""
        return self.a * self.g + self.h

    @property
    def vertices(self) -> tuple[Vec, Vec, Vec]:
        return ((self.a, 0), (self.b, self.c), (-self.d, -self.e))

    @property
    def psi(self) -> Mat2:
        """The monomial substitution matrix ((a+d, e), (b+d, c+e)).

        Acting on column vectors it carries Arg(x, y) to the argument pair
        of (x^(a+d) y^e, x^(b+d) y^(c+e)); its determinant is n.
        """
        return ((self.a + self.d, self.e), (self.b + self.d, self.c + self.e))

    @property
    def phi0(self) -> Mat2:
        """Transpose of psi."""
        p = self.psi
        return ((p[0][0], p[1][0]), (p[0][1], p[1][1]))

    def triangle(self) -> LatticeTriangle:
        return LatticeTriangle(*self.vertices)

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "d": self.d,
            "e": self.e,
            "g": self.g,
            "h": self.h,
            "n": self.n,
            "transform": [list(row) for row in self.transform],
            "vertices": [list(v) for v in self.vertices],
        }


def _assignment_normal_form(va: Vec, vb: Vec, vc: Vec) -> tuple[tuple, Mat2]:
    """Normal form for one cyclic vertex assignment (va -> (a, 0))."""
    content = gcd(va[0], va[1])
    px, py = va[0] // content, va[1] // content
    _, s, t = xgcd(px, py)
    u0: Mat2 = ((s, t), (-py, px))
    a = content
    b0, c = mat2_apply(u0, vb)
    mdx, mdy = mat2_apply(u0, vc)
    d0, e = -mdx, -mdy
    # c, e > 0 is forced by the origin-interior cross products.
    b = b0 % c
    k = (b - b0) // c
    d = d0 + k * e
    shear: Mat2 = ((1, k), (0, 1))
    return (a, b, c, d, e), mat2_mul(shear, u0)


def normalize(tri: LatticeTriangle) -> tuple[NormalizedTriangle, Mat2]:
    """Deterministic SL2(Z) normal form of an origin-interior triangle.

    Each of the three cyclic vertex assignments yields a unique candidate
    (a, b, c, d, e) with 0 <= b < c; among the assignments with
    gcd(a, h) = 1 the lexicographically smallest tuple wins.  Raises
    ``NonCoprime`` when no assignment is admissible.
    """
    candidates = []
    rejected = []
    verts = tri.vertices
    for i in range(3):
        abcde, u = _assignment_normal_form(verts[i], verts[(i + 1) % 3], verts[(i + 2) % 3])
        a, b, c, d, e = abcde
        h = c * d - b * e
        if gcd(a, h) == 1:
            candidates.append((abcde, u))
        else:
            rejected.append((a, h, gcd(a, h)))
    if not candidates:
        ks = sorted({k for (_, _, k) in rejected})
        raise NonCoprime(
            f"gcd(a, h) != 1 for every vertex assignment (gcd values {ks}); "
            f"a k-fold base change x -> x^k would be required and is out of scope"
        )
    abcde, u = min(candidates, key=lambda cu: cu[0])
    nt = NormalizedTriangle(*abcde, transform=u)
    assert mat2_det(u) == 1
    mapped = sorted(mat2_apply(u, v) for v in verts)
    assert mapped == sorted(nt.vertices), (mapped, nt.vertices)
    return nt, u


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


def _eye(k: int) -> list[list[int]]:
    return [[int(i == j) for j in range(k)] for i in range(k)]


def smith_normal_form(m) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Smith normal form of a small integer matrix.

    Returns (U, D, V) with U * M * V = D, D diagonal with nonnegative
    entries d1 | d2 | ..., and U, V unimodular (det +-1).
    """
    a = [[int(x) for x in row] for row in m]
    rows, cols = len(a), len(a[0])
    u = _eye(rows)
    v = _eye(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, q):
        # row[dst] += q * row[src]
        for k in range(cols):
            a[dst][k] += q * a[src][k]
        for k in range(rows):
            u[dst][k] += q * u[src][k]

    def add_col(src, dst, q):
        for r in a:
            r[dst] += q * r[src]
        for r in v:
            r[dst] += q * r[src]

    def negate_row(i):
        for k in range(cols):
            a[i][k] = -a[i][k]
        for k in range(rows):
            u[i][k] = -u[i][k]

    for k in range(min(rows, cols)):
        while True:
            # Move a smallest-magnitude nonzero entry of the minor to (k, k).
            pivot = None
            for i in range(k, rows):
                for j in range(k, cols):
                    if a[i][j] != 0 and (pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            if pivot != (k, k):
                if pivot[0] != k:
                    swap_rows(k, pivot[0])
                if pivot[1] != k:
                    swap_cols(k, pivot[1])
            dirty = False
            for i in range(k + 1, rows):
                if a[i][k]:
                    q = -(a[i][k] // a[k][k])
                    add_row(k, i, q)
                    if a[i][k]:
                        dirty = True
            for j in range(k + 1, cols):
                if a[k][j]:
                    q = -(a[k][j] // a[k][k])
                    add_col(k, j, q)
                    if a[k][j]:
                        dirty = True
            if dirty:
                continue
            # Enforce divisibility against the remaining minor.
            offender = None
            for i in range(k + 1, rows):
                for j in range(k + 1, cols):
                    if a[i][j] % a[k][k]:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(offender, k, 1)
        if k < min(rows, cols) and a[k][k] < 0:
            negate_row(k)
    return u, a, v


def invariant_factors(m) -> list[int]:
    """Nontrivial invariant factors (> 1) of an integer matrix's cokernel."""
    _, d, _ = smith_normal_form(m)
    return [d[i][i] for i in range(min(len(d), len(d[0]))) if d[i][i] > 1]


# ---------------------------------------------------------------------------
# Finite abelian groups of torus points
# ---------------------------------------------------------------------------

Rot = tuple[Fraction, Fraction]


def _frac1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Invariant-factor presentation of a finite subgroup of (R/Z)^2.

    Each generator is a rotation-number pair (theta_alpha, theta_beta) in
    units of full turns; the i-th generator has order invariant_factors[i],
    and the factors divide in increasing order.
    """

    invariant_factors: tuple[int, ...]
    generators: tuple[Rot, ...]

    @property
    def order(self) -> int:
        out = 1
        for f in self.invariant_factors:
            out *= f
        return out

    def elements(self) -> list[Rot]:
        """All group elements as reduced rotation pairs in [0,1)^2."""
        out = []
        ranges = [range(f) for f in self.invariant_factors]
        for combo in itertools.product(*ranges):
            t1 = Fraction(0)
            t2 = Fraction(0)
            for mult, (g1, g2) in zip(combo, self.generators):
                t1 += mult * g1
                t2 += mult * g2
            out.append((_frac1(t1), _frac1(t2)))
        return out

    def to_json(self) -> dict:
        return {
            "invariant_factors": list(self.invariant_factors),
            "generators": [
                [[g[0].numerator, g[0].denominator], [g[1].numerator, g[1].denominator]]
                for g in self.generators
            ],
        }


def torus_kernel(m: Mat2) -> FiniteAbelianGroup:
    """The group { theta in (R/Z)^2 : M @ theta is integral } for det M != 0."""
    u, d, v = smith_normal_form(m)
    factors = []
    gens: list[Rot] = []
    for i in range(2):
        di = d[i][i]
        if di == 0:
            raise ValueError("matrix is singular; kernel is not finite")
        if di > 1:
            factors.append(di)
            g = (Fraction(v[0][i], di), Fraction(v[1][i], di))
            gens.append((_frac1(g[0]), _frac1(g[1])))
    return FiniteAbelianGroup(tuple(factors), tuple(gens))


def k0_group(nt: NormalizedTriangle) -> FiniteAbelianGroup:
    """The order-n torus group acting on fibers of the potential.

    Elements are rotation pairs (theta_alpha, theta_beta) with
    (a+d)*theta_alpha + e*theta_beta and (b+d)*theta_alpha + (c+e)*theta_beta
    both integral, i.e. the kernel of the psi substitution on the torus.
    For exactly these pairs the three monomials of the potential pick up a
    common phase, so (x, y) -> (alpha x, beta y) permutes the fibers.
    """
    return torus_kernel(nt.psi)


# ---------------------------------------------------------------------------
# Quotient-stack weight data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StackData:
    """Weight and finite-quotient data of the toric stack of a triangle."""

    weights: tuple[int, int, int]
    surjective: bool
    gcd_abc: int
    k2: FiniteAbelianGroup

    def to_json(self) -> dict:
        return {
            "weights": list(self.weights),
            "surjective": self.surjective,
            "gcd_abc": self.gcd_abc,
            "k2": self.k2.to_json(),
        }


def stack_weights(tri: LatticeTriangle) -> StackData:
    """Weights of the rank-1 kernel of e_i -> v_i, plus cokernel structure.

    The raw relation vector is (cross(v2,v3), cross(v3,v1), cross(v1,v2)),
    componentwise positive for an origin-interior CCW triangle; ``weights``
    is its primitive form.  ``gcd_abc`` is the content of the raw vector,
    which also equals the index of the sublattice generated by the
    vertices, so the map to Z^2 is surjective iff gcd_abc == 1.  ``k2``
    presents the finite quotient Z^2 / <v1, v2, v3>.
    """
    v1, v2, v3 = tri.vertices
    raw = (cross(v2, v3), cross(v3, v1), cross(v1, v2))
    k = gcd(gcd(raw[0], raw[1]), raw[2])
    weights = (raw[0] // k, raw[1] // k, raw[2] // k)
    m = [[v1[0], v2[0], v3[0]], [v1[1], v2[1], v3[1]]]
    _, d, _ = smith_normal_form(m)
    factors = []
    gens: list[Rot] = []
    for i in range(2):
        if d[i][i] > 1:
            factors.append(d[i][i])
            gens.append((Fraction(1, d[i][i]), Fraction(0)) if i == 0 else (Fraction(0), Fraction(1, d[i][i])))
    k2 = FiniteAbelianGroup(tuple(factors), tuple(gens))
    return StackData(weights=weights, surjective=(k == 1), gcd_abc=k, k2=k2)
