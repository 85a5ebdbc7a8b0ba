"""Exception hierarchy shared by every module of the package."""


class BregmanError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(BregmanError, ValueError):
    """A coordinate lies outside the (strict interior of the) domain."""


class DegenerateVector(BregmanError, ValueError):
    """A tangent vector or edge has (numerically) zero length."""


class BasePointMismatch(BregmanError, ValueError):
    """Two tangent vectors that must share a base point do not."""


class EmptyIntersection(BregmanError):
    """No crossing was found between two flats in the search window."""


class SingularSystem(BregmanError, ArithmeticError):
    """A linear system has no unique solution."""


class SingularJacobian(SingularSystem):
    """Newton's method hit a (numerically) singular Jacobian."""


class NoConvergence(BregmanError, ArithmeticError):
    """An iterative solver stopped before reaching its tolerance."""


class DegenerateQuadratic(BregmanError, ArithmeticError):
    """A quadratic degenerated to an equation with no usable root."""


class BothRootsAtQ(BregmanError, ArithmeticError):
    """Both roots of the dual-orthogonality quadratic coincide with q."""
