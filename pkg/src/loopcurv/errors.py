"""Exception hierarchy shared by the symbolic and spectral layers."""


class LoopCurvError(Exception):
    """Base class for all package errors."""


class InvalidAlgebra(LoopCurvError):
    pass


class InvalidInput(LoopCurvError, ValueError):
    pass


class InputError(InvalidInput):
    """Malformed user input (JSON, rational strings, CLI values)."""

    def __init__(self, message: str, position: str | None = None):
        self.position = position
        super().__init__(f"{position}: {message}" if position else message)


class KernelViolation(LoopCurvError, ValueError):
    pass


class SobolevRange(LoopCurvError, ValueError):
    pass


class InsufficientDepth(LoopCurvError):
    def __init__(self, message: str, required: object = None):
        self.required = required
        super().__init__(message)


class BelowCutoff(LoopCurvError):
    pass


class InvalidTruncation(LoopCurvError, ValueError):
    pass


class RankDeficient(LoopCurvError):
    pass
