"""Exception types raised across the package."""


class SizeError(ValueError):
    """Register size out of range or mismatched dimensions."""


class QubitIndexError(IndexError):
    """A qubit label or outcome index is not valid for the object it addresses."""


class ImpossibleBranchError(Exception):
    """A projection was requested onto a branch with (numerically) zero probability."""

    def __init__(self, message: str, probability: float = 0.0):
        super().__init__(message)
        self.probability = probability


class BasisError(ValueError):
    """A measurement basis failed its orthonormality check."""


class NormalizationError(ValueError):
    """State coefficients do not have unit norm."""


class ProtocolError(RuntimeError):
    """An LOCC constraint was violated by a protocol transcript."""


class CircuitParseError(ValueError):
    def __init__(self, message: str, lineno: int):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class ContractError(ValueError):
    """A function was called on a circuit that does not meet its precondition."""
