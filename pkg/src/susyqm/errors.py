"""Exception types shared across the package."""


class SusyQMError(Exception):
    """Base class for all package errors."""


class JetDivisionError(SusyQMError, ZeroDivisionError):
    """Division by a jet whose value is (numerically) zero."""


class NonConvergence(SusyQMError):
    """Adaptive quadrature hit its subdivision limit."""


class InvalidIndex(SusyQMError, ValueError):
    """Eigenstate index not in the model's index set."""


class PolynomialZero(SusyQMError, ValueError):
    """Evaluation at (or too close to) a zero of a polynomial divisor."""


class NodeOfPsi(SusyQMError, ValueError):
    """A superpotential was requested at a node of its seed eigenfunction."""


class SingularFamily(SusyQMError, ValueError):
    """|C| does not exceed the singularity threshold."""


class MissingState(SusyQMError, ValueError):
    """The seed level k == n cannot be reached by the operator map."""


class NonFinitePotential(SusyQMError, ValueError):
    """Potential evaluated to inf/nan on the grid."""


class ConvergenceFailure(SusyQMError):
    """Eigensolver did not converge."""


class GridMismatch(SusyQMError, ValueError):
    """Sampled arrays do not live on the same grid."""
