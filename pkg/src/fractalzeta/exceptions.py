"""Exception hierarchy shared by every module."""


class FractalZetaError(Exception):
    """Base class for all errors raised by fractalzeta."""


class DomainError(FractalZetaError, ValueError):
    """An argument lies outside the validity window of a formula."""


class DivergenceError(FractalZetaError, ArithmeticError):
    """A zeta integral or series diverges at the requested point."""


class UnsupportedVariantError(FractalZetaError, NotImplementedError):
    """No evaluator exists for this combination of descriptor variants."""


class CapacityError(FractalZetaError, MemoryError):
    """A construction would exceed its configured size budget."""


class ResolutionError(FractalZetaError):
    """A raster is too coarse for the requested tolerance."""


class NonStabilizingError(FractalZetaError):
    """An iterative refinement failed to settle within its budget."""


class BoundaryPoleError(FractalZetaError):
    """A pole sits too close to a contour for a reliable winding count."""


class IndependenceError(FractalZetaError, ValueError):
    """Exponent vectors are rationally dependent.

    The dependency certificate is stored on ``certificate``.
    """

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class TailUnboundedError(FractalZetaError, ValueError):
    """Tube samples stop too early and no small-t model was supplied."""
