"""Exception hierarchy shared by all modules.

Two bases matter for the CLI exit-code contract: DomainError (bad arguments
or violated preconditions, exit 2) and NumericsError (data-driven validity
failures discovered mid-computation, exit 3).
"""


class MobiusLabError(Exception):
    """Base class for all package errors."""


class DomainError(MobiusLabError):
    """Precondition or argument violation (CLI exit code 2)."""


class NumericsError(MobiusLabError):
    """Numerical-validity failure (CLI exit code 3)."""


class ChartMismatchError(DomainError):
    """Fields defined on different charts were combined."""


class SingularImmersionError(NumericsError):
    """Immersion degenerates: conformal factor below threshold at a node."""


class UmbilicFrameError(NumericsError):
    """Lift frame (psi, psi_x, psi_y) is linearly dependent at a node."""


class InconsistentCurvatureError(NumericsError):
    """H^2 - K significantly negative; curvature data is inconsistent."""


class ValidityWindowError(DomainError):
    """ODE initial data violates the validity window (e.g. H_s >= 0)."""


class PoleOfFamilyError(NumericsError):
    """Deformation family has a pole (1 + 2iht = 0) on the grid."""


class InflectionError(NumericsError):
    """Curve has kappa_E <= 0; the angle parameter is not admissible."""


class DegenerateFrameError(NumericsError):
    """Similarity frame matrix is singular at a node."""


class StepSizeError(DomainError):
    """Time step violates the stability bound."""


class BlowupError(NumericsError):
    """Non-finite values appeared during time evolution."""
