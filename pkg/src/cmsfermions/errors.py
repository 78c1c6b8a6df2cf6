"""Exception types shared across the package."""


class PoleError(ValueError):
    """Argument sits on a pole of a special function or a potential."""


class SingularityError(ValueError):
    """Two coordinates coincide where the kernel has a logarithmic or power singularity."""


class InterlacingError(ValueError):
    """Primed coordinates do not interlace the unprimed ones."""


class NonConvergenceError(ArithmeticError):
    """A series or iteration did not reach the requested accuracy."""


class ToleranceNotMet(RuntimeError):
    """Quadrature escalation reached its node ceiling without meeting ``rel_tol``."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class StencilError(ValueError):
    """A finite-difference stencil leaves the admissible domain."""
