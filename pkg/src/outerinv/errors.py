"""Exception hierarchy for outerinv."""


class OuterInverseError(Exception):
    """Base class for all errors raised by this package."""


class FactorizationError(OuterInverseError):
    """A matrix factorization failed to converge."""


class DimensionError(OuterInverseError, ValueError):
    """Operands have incompatible shapes or ambient dimensions."""


class SingularMatrixError(OuterInverseError):
    """A matrix that must be inverted is singular to working tolerance.

    ``rcond`` holds the reciprocal condition number that triggered the error.
    """

    def __init__(self, msg, rcond=None):
        super().__init__(msg)
        self.rcond = rcond


class FormulaSingularityError(SingularMatrixError):
    """An ``(I + ...)`` factor in a perturbation formula is not invertible."""


class NotComplementaryError(OuterInverseError):
    """Two subspaces do not form a direct sum of the ambient space."""


class InfeasiblePrescriptionError(OuterInverseError, ValueError):
    """Range and kernel dimensions cannot be realised by one operator."""


class NoGroupInverseError(OuterInverseError):
    """The matrix has index greater than one."""


class NotSolvableError(OuterInverseError):
    """The outer inverse with the requested range and kernel does not exist.

    ``diagnostics`` is the :class:`~outerinv.geninv.ExistenceDiagnostics`
    describing which condition failed.
    """

    def __init__(self, msg, diagnostics=None):
        super().__init__(msg)
        self.diagnostics = diagnostics


class WeightError(OuterInverseError, ValueError):
    """A weight matrix is not symmetric positive definite."""


class NotDefinedError(OuterInverseError):
    """The Bott-Duffin inverse is not defined for this pair."""


class HypothesisViolation(OuterInverseError):
    """A perturbation hypothesis fails and strict mode was requested.

    ``report`` carries the measured values so callers can still inspect them.
    """

    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


class GenerationError(OuterInverseError):
    """Random instance generation gave up after too many rejections."""
