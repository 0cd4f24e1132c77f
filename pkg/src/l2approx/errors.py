"""Exception types shared across the package."""


class L2ApproxError(Exception):
    """Base class for all errors raised by this package."""


class MismatchedGroup(L2ApproxError):
    """An element or operand does not belong to the expected group."""


class MalformedGroup(L2ApproxError):
    """A group description fails its structural checks (e.g. bad table)."""


class InfiniteGroup(L2ApproxError):
    """A finite-group-only operation was applied to an infinite group."""


class UndefinedGenerator(L2ApproxError):
    """A homomorphism lacks an image for a required generator/element."""


class DimensionMismatch(L2ApproxError):
    """Matrix dimensions are incompatible for the requested operation."""


class NotHermitian(L2ApproxError):
    """A numeric matrix deviates from Hermitian symmetry beyond tolerance."""


class WrongGroup(L2ApproxError):
    """The operation needs a specific group family (e.g. free abelian)."""


class NotPSD(L2ApproxError):
    """An integer matrix claimed positive semidefinite is not."""


class RootFindFailure(L2ApproxError):
    """Polynomial root finding did not reach the requested accuracy."""


class CertificationFailed(L2ApproxError):
    """No polynomial up to the degree cap certified the sandwich bounds."""


class InsufficientLevels(L2ApproxError):
    """A convergence check needs more approximation levels than provided."""


class HypothesisViolated(L2ApproxError):
    """A run violates the hypothesis of the check being applied."""


class NotInverse(L2ApproxError):
    """The supplied pair of matrices fails the exact A*B = B*A = I check."""


class NotAComplex(L2ApproxError):
    """Boundary maps fail the exact chain-complex condition."""

    def __init__(self, degree, message=None):
        self.degree = degree
        super().__init__(message or f"boundary composition is nonzero at degree {degree}")


class TorsionUndefined(L2ApproxError):
    """Torsion was requested for a complex that is not L2-acyclic."""


class SchemeError(L2ApproxError):
    """An approximation scheme is inconsistent with the given matrix."""


class InjectivityUncertified(UserWarning):
    """A tower level could not certify injectivity on the needed support."""
