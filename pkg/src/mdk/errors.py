"""Exception hierarchy.

``DomainError`` subclasses are expected failure modes of valid API usage
(bad input triangles, rejected parameter ranges, detected inconsistencies);
the CLI maps them to exit code 1.  Everything else is a bug.
"""


class DomainError(Exception):
    """Base class for input-domain and consistency failures."""


class Degenerate(DomainError):
    """The three vertices are collinear (or not pairwise distinct)."""


class OriginNotInterior(DomainError):
    """The origin is on the boundary of, or outside, the triangle."""


class NonCoprime(DomainError):
    """gcd(a, h) != 1 for every admissible vertex assignment.

    Such a triangle needs a preliminary k-fold base change x -> x^k
    (k = gcd(a, h)) before the fibration analysis applies; that reduction
    changes the fiber topology and is deliberately not performed here.
    """


class OracleMismatch(DomainError):
    """Closed-form critical values disagree with the gradient oracle."""


class SolveFailure(DomainError):
    """The critical-point solver found the wrong number of solutions."""


class RootFindingFailure(DomainError):
    """Polynomial root finding did not converge to the residual target."""


class ContinuityLoss(DomainError):
    """Adaptive continuation could not maintain root continuity."""


class AmbiguousMatching(DomainError):
    """Two root-matching assignments are within tolerance of each other."""


class NotInOrbit(DomainError):
    """A group translate of a critical value matched no critical value."""


class InvalidGraph(DomainError):
    """A graph violates the structural requirements of a dimer model."""


class NoMatching(DomainError):
    """The graph admits no perfect matching."""


class NoInternalMatching(DomainError):
    """No perfect matching realizes the expected interior lattice point."""


class SheetTrackingFailure(DomainError):
    """Sheet continuation along a matching path lost the merging pair."""


class NotBijective(DomainError):
    """Curve-to-face assignment failed to be a bijection."""


class CountMismatch(DomainError):
    """Combinatorial and geometric intersection counts disagree."""
