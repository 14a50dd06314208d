"""Exception types shared across the package."""


class CsmSimError(Exception):
    """Base class for all domain errors raised by csm_sim."""


class DimensionMismatch(CsmSimError, ValueError):
    """Operands live in spaces of different dimension."""


class IndexOutOfRange(CsmSimError, IndexError):
    """Outcome index not in [0, dim)."""


class NonOrthonormalInput(CsmSimError, ValueError):
    """An explicit basis matrix fails the orthonormality tolerance."""


class StrengthOutOfRange(CsmSimError, ValueError):
    """Uniform meter-overlap strength outside [0, 1]."""


class InvalidGramMatrix(CsmSimError, ValueError):
    """Overlap matrix is not Hermitian with unit diagonal."""


class NotPositiveSemidefinite(InvalidGramMatrix):
    """Overlap matrix has an eigenvalue below the PSD tolerance."""


class MeterNotOrthogonal(CsmSimError, ValueError):
    """Operation requires mutually orthogonal meter states."""


class InvalidMeterStates(CsmSimError, ValueError):
    """Meter state matrix fails the unit-norm column check."""


class InvalidDistribution(CsmSimError, ValueError):
    """Probability vector fails the [0,1] / sum-to-one checks."""


class LengthMismatch(CsmSimError, ValueError):
    """Outcome sequence length differs from the protocol length."""


class InitialMismatch(CsmSimError, ValueError):
    """First outcome of a sequence disagrees with the protocol's initial modality."""


class ZeroProbabilityPath(CsmSimError, ValueError):
    """Entropy production is undefined on a forward path of probability zero."""


class InternalConsistencyError(CsmSimError, RuntimeError):
    """A computed quantity violates a property it must satisfy by construction.

    Raised e.g. when a probability lands outside [0,1] by more than the
    validation tolerance, or when a quantity that must be real carries a
    larger imaginary residue; distinguishes genuine bugs from rounding.
    """


class ScenarioParseError(CsmSimError, ValueError):
    """Scenario file is not syntactically valid."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class ScenarioValidationError(CsmSimError, ValueError):
    """Scenario file is syntactically valid but violates the schema."""

    def __init__(self, field: str, reason: str):
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}")
