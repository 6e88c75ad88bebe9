"""Exception taxonomy shared across the package."""


class FreeBurgersError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(FreeBurgersError, ValueError):
    """A constructor or operation received an out-of-range parameter."""


class InvalidDomainError(FreeBurgersError, ValueError):
    """A measure lives on the wrong domain for the requested operation."""


class OutOfDomainError(FreeBurgersError, ValueError):
    """An evaluation point is outside an evaluator's domain."""


class CompositionUndefinedError(FreeBurgersError, ValueError):
    """Series composition needs the inner series to vanish at 0."""


class NotInvertibleError(FreeBurgersError, ValueError):
    """Series inversion needs a nonzero linear coefficient.

    For moment series this signals a vanishing first moment; callers
    should switch to the symmetric square-root branch.
    """


class BranchUndefinedError(FreeBurgersError, ValueError):
    """Series square root needs a positive constant term."""


class SUndefinedError(FreeBurgersError, ValueError):
    """The S-transform is undefined for this measure/branch combination."""


class DegenerateMeasureError(FreeBurgersError, ValueError):
    """The measure has unit mass at the origin, so Psi is not invertible."""


class InvalidInputError(FreeBurgersError, ValueError):
    """Mismatched or inconsistent inputs to an operation."""


class SolverFailedError(FreeBurgersError, RuntimeError):
    """Fixed-point iteration did not converge at a point."""

    def __init__(self, message, z=None, residual=None):
        super().__init__(message)
        self.z = z
        self.residual = residual


class DomainEscapeError(FreeBurgersError, RuntimeError):
    """A fixed-point iterate left the initial evaluator's domain."""


class EvolutionFailedError(FreeBurgersError, RuntimeError):
    """Too many grid points failed during an evolution run."""


class InversionFailedError(FreeBurgersError, RuntimeError):
    """Stieltjes inversion recovered a measure with unacceptable mass."""


class StepFailedError(FreeBurgersError, RuntimeError):
    """An SDE step was rejected too many consecutive times."""
