"""Package exception types."""


class ChasmnetError(Exception):
    """Base class for all package errors."""


class RangeError(ChasmnetError, ValueError):
    """A parameter fell outside its valid range."""

    def __init__(self, field, value, requirement):
        self.field = field
        self.value = value
        super().__init__(f"{field}={value!r} violates {requirement}")


class VariantConstraintError(ChasmnetError, ValueError):
    """A homophily level contradicts the declared model variant."""


class NonConvergenceError(ChasmnetError, RuntimeError):
    """Fixed-point iteration and bisection fallback both failed."""


class PathologicalParametersError(ChasmnetError, RuntimeError):
    """The literal rejection loop exceeded its restart guard."""


class InsufficientSupportError(ChasmnetError, ValueError):
    """Too little data to run the requested statistic."""


class MemoryGuardError(ChasmnetError, RuntimeError):
    """A transform would exceed its configured memory cap."""

    def __init__(self, needed, cap):
        self.needed = needed
        self.cap = cap
        super().__init__(
            f"projection needs {needed} edges, above the cap of {cap}; "
            f"raise max_edges to at least {needed} to proceed"
        )


class IngestError(ChasmnetError, ValueError):
    """Malformed input data; carries the offending line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
