"""Exception hierarchy shared by every module.

All numerical failures derive from :class:`NumericalError` so that the
command line layer can map them to a single exit code, while validation
problems derive from :class:`ValidationError`.
"""


class JuliaThermoError(Exception):
    """Base class for all package errors."""

    kind = "error"

    def to_dict(self):
        return {"error": self.kind, "message": str(self)}


class ValidationError(JuliaThermoError, ValueError):
    """Malformed input: coefficients, models, configs, potentials."""

    kind = "ValidationError"

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field

    def to_dict(self):
        d = super().to_dict()
        if self.field is not None:
            d["field"] = self.field
        return d


class NumericalError(JuliaThermoError, ArithmeticError):
    """Base class for failures of a numerical procedure."""

    kind = "NumericalError"


class PoleProximity(NumericalError):
    """A denominator fell below the pole floor."""

    kind = "PoleProximity"


class NoConvergence(NumericalError):
    kind = "NoConvergence"


class NotCertified(NumericalError):
    """Hyperbolicity could not be certified; ``reason`` says why."""

    kind = "NotCertified"

    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason

    def to_dict(self):
        d = super().to_dict()
        d["reason"] = self.reason
        return d


class NotFullShift(NumericalError):
    kind = "NotFullShift"


class BranchLost(NumericalError):
    """Branch continuation left the disk that identifies the branch."""

    kind = "BranchLost"


class BadBracket(NumericalError):
    kind = "BadBracket"


class ResolutionExceeded(NumericalError):
    """Frequency too large for the leaf resolution of a measure."""

    kind = "ResolutionExceeded"


class InsufficientData(NumericalError):
    kind = "InsufficientData"


class EmptyBlockFamily(NumericalError):
    kind = "EmptyBlockFamily"


class ZeroValue(NumericalError):
    kind = "ZeroValue"


class MissingArtifacts(NumericalError):
    kind = "MissingArtifacts"
