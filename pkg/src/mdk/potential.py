"""The three-term Laurent potential of a normalized triangle.

W(x, y) = x^a + x^b y^c + x^(-d) y^(-e), whose Newton polygon is the
normalized triangle.  This module computes its critical values in closed
form, independently re-derives them from the gradient system (the
oracle), solves the degree-n branch-point equation of the x-plane
covering at any base value t, and applies the finite symmetry group to
critical values.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import NonCoprime, NotInOrbit, OracleMismatch, SolveFailure
from .lattice import NormalizedTriangle, Rot, xgcd
from .roots import aberth, relative_residuals

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Potential:
    """W = x^a + x^b y^c + x^(-d) y^(-e) for a normalized triangle."""

    nt: NormalizedTriangle

    @property
    def exponents(self) -> tuple[tuple[int, int], tuple[int, int], tuple[int, int]]:
        return self.nt.vertices

    @property
    def a(self) -> int:
        return self.nt.a

    @property
    def b(self) -> int:
        return self.nt.b

    @property
    def c(self) -> int:
        return self.nt.c

    @property
    def d(self) -> int:
        return self.nt.d

    @property
    def e(self) -> int:
        return self.nt.e

    @property
    def g(self) -> int:
        return self.nt.g

    @property
    def h(self) -> int:
        return self.nt.h

    @property
    def n(self) -> int:
        return self.nt.n

    def __call__(self, x: complex, y: complex) -> complex:
        a, b, c, d, e = self.nt.abcde
        return x**a + x**b * y**c + x**-d * y**-e

    def grad(self, x: complex, y: complex) -> tuple[complex, complex]:
        """(x dW/dx, y dW/dy): the logarithmic gradient, zero exactly at
        the critical points of W on the algebraic torus."""
        a, b, c, d, e = self.nt.abcde
        m1 = x**a
        m2 = x**b * y**c
        m3 = x**-d * y**-e
        return (a * m1 + b * m2 - d * m3, c * m2 - e * m3)

    def fiber_coeffs(self, x: complex, t: complex) -> np.ndarray:
        """Ascending coefficients in y of the fiber equation over x:
        x^(b+d) y^(c+e) + (x^a - t) x^d y^e + 1 = 0."""
        a, b, c, d, e = self.nt.abcde
        coeffs = np.zeros(self.g + 1, dtype=complex)
        coeffs[0] = 1.0
        coeffs[e] = (x**a - t) * x**d
        coeffs[self.g] = x ** (b + d)
        return coeffs

    def branch_coeffs(self, t: complex) -> np.ndarray:
        """Ascending coefficients of the degree-n branch polynomial
        (-1)^g (c^c e^e / g^g) (x^a - t)^g x^h - 1."""
        a, c, e, g, h = self.a, self.c, self.e, self.g, self.h
        const = (-1) ** g * (c**c * e**e) / float(g**g)
        coeffs = np.zeros(self.n + 1, dtype=complex)
        for k in range(g + 1):
            coeffs[a * k + h] += const * comb(g, k) * (-t) ** (g - k)
        coeffs[0] += -1.0
        return coeffs

    def to_json(self) -> dict:
        return {
            "abcde": list(self.nt.abcde),
            "g": self.g,
            "h": self.h,
            "n": self.n,
            "exponents": [list(v) for v in self.exponents],
        }


def build_potential(nt: NormalizedTriangle) -> Potential:
    """Attach the potential to a normalized triangle; requires gcd(a, h) = 1."""
    if gcd(nt.a, nt.h) != 1:
        raise NonCoprime(
            f"gcd(a, h) = gcd({nt.a}, {nt.h}) != 1; the x -> x^k base change "
            f"needed here is out of scope"
        )
    return Potential(nt)


@dataclass(frozen=True)
class CriticalValue:
    """One closed-form critical value t = r exp(2 pi i index / n)."""

    t: complex
    index: int
    modulus: float


def _closed_form_modulus(p: Potential) -> float:
    a, c, e, g, h, n = p.a, p.c, p.e, p.g, p.h, p.n
    log_tn = (
        n * math.log(n)
        - a * g * math.log(a)
        - c * a * math.log(c)
        - e * a * math.log(e)
        - h * math.log(h)
    )
    return math.exp(log_tn / n)


def _printed_equation_tn(p: Potential) -> float:
    """t^n according to the uncorrected printed closed form, kept for
    diagnostics: (a+h)^(a g) n^h / (a^(a g) h^h c^(c a) e^(e a)).

    For the standard (1,0,1,1,1) triangle this evaluates to t^3 = 12 while
    the gradient system gives t^3 = 27; the corrected form used by
    ``critical_values`` reproduces 27.  Both numbers are logged.
    """
    a, c, e, g, h, n = p.a, p.c, p.e, p.g, p.h, p.n
    log_tn = (
        a * g * math.log(a + h)
        + h * math.log(n)
        - a * g * math.log(a)
        - h * math.log(h)
        - c * a * math.log(c)
        - e * a * math.log(e)
    )
    return math.exp(log_tn)


def critical_values(
    p: Potential, verify_oracle: bool = True, tol: float = 1e-9
) -> list[CriticalValue]:
    """The n closed-form critical values r zeta_n^k, index 0 positive real.

    The modulus solves t^n = n^n / (a^(ag) c^(ca) e^(ea) h^h).  With
    ``verify_oracle`` the values are checked as a multiset against the
    gradient oracle and ``OracleMismatch`` is raised on disagreement; the
    check fails exactly when the triangle's vertices generate a proper
    sublattice (gcd_abc > 1), where the true critical values collapse onto
    n/gcd_abc points.
    """
    n = p.n
    r = _closed_form_modulus(p)
    log.info(
        "critical values: derived t^n = %.12g, printed-equation t^n = %.12g (n=%d)",
        r**n,
        _printed_equation_tn(p),
        n,
    )
    values = [
        CriticalValue(t=r * complex(math.cos(TWO_PI * k / n), math.sin(TWO_PI * k / n)), index=k, modulus=r)
        for k in range(n)
    ]
    if verify_oracle:
        oracle = critical_points_oracle(p)
        closed = np.array([v.t for v in values])
        found = np.array([t for (_, _, t) in oracle])
        cost = np.abs(closed[:, None] - found[None, :])
        rows, cols = linear_sum_assignment(cost)
        worst = cost[rows, cols].max() / r
        if worst > tol:
            raise OracleMismatch(
                f"closed-form critical values disagree with the gradient oracle "
                f"(worst relative mismatch {worst:.3e}); distinct oracle values: "
                f"{sorted(set(np.round(found, 9)))}"
            )
    return values


def _newton_polish(p: Potential, x: complex, y: complex, steps: int = 4) -> tuple[complex, complex]:
    """Newton iteration on the logarithmic gradient to machine precision."""
    a, b, c, d, e = p.nt.abcde
    for _ in range(steps):
        m1 = x**a
        m2 = x**b * y**c
        m3 = x**-d * y**-e
        f1 = a * m1 + b * m2 - d * m3
        f2 = c * m2 - e * m3
        j11 = (a * a * m1 + b * b * m2 + d * d * m3) / x
        j12 = (b * c * m2 + d * e * m3) / y
        j21 = (c * b * m2 + e * d * m3) / x
        j22 = (c * c * m2 + e * e * m3) / y
        det = j11 * j22 - j12 * j21
        if det == 0:
            break
        dx = (f1 * j22 - f2 * j12) / det
        dy = (j11 * f2 - j21 * f1) / det
        x, y = x - dx, y - dy
    return x, y


def critical_points_oracle(
    p: Potential, tol: float = 1e-7
) -> list[tuple[complex, complex, complex]]:
    """All critical points of W on the torus, found independently.

    Eliminating y from the gradient system gives the one-variable equation
    x^n = h^g / (a^g c^c e^e); back-substitution recovers y through
    y^c = (a e / h) x^(a-b) and y^e = (h / (a c)) x^(-(a+d)), keeping only
    the consistent combinations.  Raises ``SolveFailure`` unless exactly
    n critical points survive validation.
    """
    a, b, c, d, e = p.nt.abcde
    g, h, n = p.g, p.h, p.n
    log_rho = (g * math.log(h) - g * math.log(a) - c * math.log(c) - e * math.log(e)) / n
    rho = math.exp(log_rho)
    m = gcd(c, e)
    _, sigma, tau = xgcd(c, e)
    points: list[tuple[complex, complex, complex]] = []
    for k in range(n):
        x = rho * complex(math.cos(TWO_PI * k / n), math.sin(TWO_PI * k / n))
        target_c = (a * e / h) * x ** (a - b)
        target_e = (h / (a * c)) * x ** -(a + d)
        ym = target_c**sigma * target_e**tau
        y0 = ym ** (1.0 / m)
        for j in range(m):
            y = y0 * complex(math.cos(TWO_PI * j / m), math.sin(TWO_PI * j / m))
            if abs(y**c - target_c) > tol * abs(target_c):
                continue
            if abs(y**e - target_e) > tol * abs(target_e):
                continue
            x2, y2 = _newton_polish(p, x, y)
            f1, f2 = p.grad(x2, y2)
            scale = abs(x2**a) + abs(x2**b * y2**c) + abs(x2**-d * y2**-e)
            if max(abs(f1), abs(f2)) > 1e-9 * scale:
                continue
            points.append((x2, y2, p(x2, y2)))
    if len(points) != n:
        raise SolveFailure(
            f"gradient system produced {len(points)} critical points, expected {n}"
        )
    return points


@dataclass(frozen=True)
class BranchSet:
    """Roots of the branch polynomial at a fixed base value t."""

    t: complex
    roots: np.ndarray
    residual: float

    @property
    def count(self) -> int:
        return len(self.roots)

    def to_json(self) -> dict:
        return {
            "t": [self.t.real, self.t.imag],
            "roots": [[z.real, z.imag] for z in self.roots],
            "residual": self.residual,
        }


def branch_points(p: Potential, t: complex, tol: float = 1e-10) -> BranchSet:
    """All n roots of the branch polynomial at base value t, sorted by
    argument, residual-verified."""
    coeffs = p.branch_coeffs(t)
    roots = aberth(coeffs)
    roots = np.array(sorted(roots, key=lambda z: math.atan2(z.imag, z.real) % TWO_PI))
    res = float(relative_residuals(coeffs, roots).max())
    return BranchSet(t=complex(t), roots=roots, residual=res)


def k0_action(p: Potential, element: Rot, cv: CriticalValue, tol: float = 1e-9) -> CriticalValue:
    """Translate a critical value by a symmetry-group element.

    The element (theta_alpha, theta_beta) multiplies t by
    exp(2 pi i (d theta_alpha + e theta_beta)); the result is identified
    with a member of the closed-form critical set by its index.  Raises
    ``NotInOrbit`` when the rotation does not land on the critical lattice,
    which happens exactly when the element is not in the triangle's group.
    """
    theta_a, theta_b = Fraction(element[0]), Fraction(element[1])
    rot = p.d * theta_a + p.e * theta_b
    shift = rot * p.n
    if shift.denominator != 1:
        raise NotInOrbit(
            f"element {element} rotates t by {rot} turns, not a multiple of 1/{p.n}"
        )
    new_index = (cv.index + shift.numerator) % p.n
    r = cv.modulus
    t = r * complex(math.cos(TWO_PI * new_index / p.n), math.sin(TWO_PI * new_index / p.n))
    if abs(t - cv.t * complex(math.cos(TWO_PI * float(rot)), math.sin(TWO_PI * float(rot)))) > tol * r:
        raise NotInOrbit(f"translate of {cv.t} missed the critical set")
    return CriticalValue(t=t, index=new_index, modulus=r)
