"""Exception hierarchy shared by all simulator layers."""


class SimulatorError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(SimulatorError):
    """Operands do not fit together (mismatched spaces, unknown symbols)."""


class ValidationError(SimulatorError):
    """A value fails its declared invariant (non-unitary matrix, bad network)."""


class ContractError(SimulatorError):
    """A precondition of an operation was violated by the caller."""


class ResolutionError(SimulatorError):
    """A path-notation label does not resolve to a network element."""


class UsageError(SimulatorError):
    """Bad command-line or scenario arguments."""


class PathSyntaxError(SimulatorError):
    """Malformed path-notation text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position
