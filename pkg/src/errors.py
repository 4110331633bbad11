from src.constants import ExitCode


class BayesNetError(Exception):
    exit_code: ExitCode = ExitCode.VALIDATION_ERROR


class ScenarioParseError(BayesNetError):
    exit_code = ExitCode.PARSE_ERROR

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        position = []
        if line is not None:
            position.append(f"line {line}")
        if field:
            position.append(f"field {field}")
        super().__init__(f"{', '.join(position)}: {message}" if position else message)


class ValidationFailure(BayesNetError):
    exit_code = ExitCode.VALIDATION_ERROR


class ToleranceViolation(ValidationFailure):
    """Raised when a measured defect exceeds the named tolerance"""

    quantity: str = "defect"

    def __init__(self, defect: float, tolerance: float, tolerance_name: str):
        self.defect = defect
        self.tolerance = tolerance
        self.tolerance_name = tolerance_name
        super().__init__(
            f"{self.quantity} {defect:.3e} violates {tolerance_name}={tolerance:.1e}"
        )


class NotHermitian(ToleranceViolation):
    quantity = "hermiticity defect"


class TraceNotOne(ToleranceViolation):
    quantity = "trace defect"


class NotPositive(ToleranceViolation):
    quantity = "minimum eigenvalue"


class NotNormalized(ToleranceViolation):
    quantity = "norm defect"


class NotUnitary(ToleranceViolation):
    quantity = "unitarity defect"


class NotOrthonormal(ToleranceViolation):
    quantity = "orthonormality defect"


class NotThermalInput(ToleranceViolation):
    quantity = "distance from thermal state"


class BadFactorization(ValidationFailure):
    pass


class IndexOutOfRange(ValidationFailure):
    pass


class WrongTimeCount(ValidationFailure):
    pass


class CopyCountMismatch(ValidationFailure):
    pass


class BadEnergyLength(ValidationFailure):
    pass


class EmptyKeepSet(ValidationFailure):
    pass


class IncompleteDistribution(ValidationFailure):
    pass


class StateNotPositive(ValidationFailure):
    pass


class DegenerateDenominator(ValidationFailure):
    pass


class InvalidShots(ValidationFailure):
    pass


class DecompositionFailed(ValidationFailure):
    pass


class InitialEvolutionNotAllowed(ValidationFailure):
    pass


class InvalidModelParameters(ValidationFailure):
    pass


class CapExceeded(BayesNetError):
    exit_code = ExitCode.CAP_EXCEEDED

    def __init__(self, requested: int, cap: int, what: str):
        self.requested = requested
        self.cap = cap
        super().__init__(f"{what} {requested} exceeds the configured cap {cap}")


class DimensionOverflow(CapExceeded):
    def __init__(self, requested: int, cap: int):
        super().__init__(requested, cap, "dimension")


class EnumerationTooLarge(CapExceeded):
    def __init__(self, requested: int, cap: int):
        super().__init__(requested, cap, "path count")


class ZeroPopulationPostselect(UserWarning):
    """Postselection on an eigenstate whose population is below the cutoff"""
