"""Exception hierarchy shared across theta_forge."""

from __future__ import annotations


class ThetaForgeError(Exception):
    """Base class for every error raised by the package."""


class DomainError(ThetaForgeError, ValueError):
    """An argument lies outside the domain of the requested function."""


class ConvergenceError(ThetaForgeError, ArithmeticError):
    """A series or product failed to converge within its iteration cap."""


class PoleError(ThetaForgeError, ZeroDivisionError):
    """Evaluation hit (or came within tolerance of) a pole."""

    def __init__(self, message: str, node: object = None):
        super().__init__(message)
        self.node = node


class NonSimplePoleError(ThetaForgeError):
    pass


class ReconstructionError(ThetaForgeError):
    """A decomposition failed to reproduce its input function."""

    def __init__(self, message: str, max_error: float = float("nan")):
        super().__init__(message)
        self.max_error = max_error


class CommonZeroError(ThetaForgeError):
    pass


class ResidueSumError(ThetaForgeError):
    pass


class ProbeError(ThetaForgeError):
    pass


class InconsistencyError(ThetaForgeError):
    pass


class SamplerExhaustedError(ThetaForgeError):
    pass


class VariableMismatchError(ThetaForgeError, ValueError):
    pass


class NotUnitError(ThetaForgeError, ArithmeticError):
    """Raised when inverting a series whose leading coefficient is not a unit."""


class TruncationError(ThetaForgeError, ValueError):
    """Requested information beyond the known part of a truncated series."""


class NotFormalError(ThetaForgeError):
    """An expression cannot be compiled to an exact q-series."""


class ParseError(ThetaForgeError, SyntaxError):
    def __init__(self, message: str, position: int = -1, text: str = ""):
        self.position = position
        self.text_source = text
        where = f" at position {position}" if position >= 0 else ""
        super().__init__(f"{message}{where}")


class UnknownSymbolError(ParseError):
    pass


class NonLinearArgumentError(ParseError):
    pass


class UnboundVariableError(ThetaForgeError, KeyError):
    pass
