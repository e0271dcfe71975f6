"""mdk: lattice-triangle potentials, their branch-point geometry on the
x-plane, coamoebas on the torus, and hexagonal dimer models, with
executable cross-checks tying the three pictures together."""

from .errors import (
    AmbiguousMatching,
    ContinuityLoss,
    CountMismatch,
    Degenerate,
    DomainError,
    InvalidGraph,
    NoInternalMatching,
    NoMatching,
    NonCoprime,
    NotBijective,
    NotInOrbit,
    OracleMismatch,
    OriginNotInterior,
    RootFindingFailure,
    SheetTrackingFailure,
    SolveFailure,
)
from .lattice import (
    FiniteAbelianGroup,
    LatticeTriangle,
    NormalizedTriangle,
    StackData,
    k0_group,
    normalize,
    smith_normal_form,
    stack_weights,
    validate_triangle,
)

__all__ = [
    "AmbiguousMatching",
    "ContinuityLoss",
    "CountMismatch",
    "Degenerate",
    "DomainError",
    "FiniteAbelianGroup",
    "InvalidGraph",
    "LatticeTriangle",
    "NoInternalMatching",
    "NoMatching",
    "NonCoprime",
    "NormalizedTriangle",
    "NotBijective",
    "NotInOrbit",
    "OracleMismatch",
    "OriginNotInterior",
    "RootFindingFailure",
    "SheetTrackingFailure",
    "SolveFailure",
    "StackData",
    "k0_group",
    "normalize",
    "smith_normal_form",
    "stack_weights",
    "validate_triangle",
]
