"""Exception hierarchy shared by all modules."""


class CoercifyError(Exception):
    """Base class for library errors."""


class InvalidArgumentError(CoercifyError, ValueError):
    """Bad input: unknown name, incompatible mesh/space/problem, wrong sizes."""


class NotSPDError(CoercifyError, ValueError):
    """A matrix expected to be symmetric positive definite is not."""


class ConvergenceError(CoercifyError, RuntimeError):
    """An iterative solver hit its iteration cap."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class QuadratureError(CoercifyError, RuntimeError):
    """Integrand degree exceeds the exactness of the quadrature rule."""
