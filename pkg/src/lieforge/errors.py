"""Exception hierarchy."""


class LieforgeError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatchError(LieforgeError, ValueError):
    """Operands live on registers of different size."""


class DenseLimitError(LieforgeError):
    """A dense representation was requested above the configured cap."""

    def __init__(self, what, size, limit):
        self.size = size
        self.limit = limit
        super().__init__(f"{what}: size {size} exceeds the dense limit {limit}")


class RoleError(LieforgeError, ValueError):
    """An operator does not have the role (Hermitian, projector, ...) an operation needs."""


class ClosureError(LieforgeError):
    """Lie closure did not converge within the configured maximum dimension."""


class CompositionError(LieforgeError, ValueError):
    pass


class NonReductiveError(LieforgeError):
    """Killing form on the derived part is degenerate."""


class DecompositionError(LieforgeError):
    """Random commutant draws failed to separate the simple ideals."""


class FilterError(LieforgeError, ValueError):
    pass


class ParseError(LieforgeError, ValueError):
    """Malformed generator file. ``lineno`` is 1-based, or None for file-level errors."""

    def __init__(self, message, lineno=None, path=None):
        self.lineno = lineno
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}".strip() if where else message)
