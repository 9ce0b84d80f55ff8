"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UnsupportedScaleError(DomainError):
    """A dense or enumerative computation was requested beyond its size cap."""


class ConsistencyError(RuntimeError):
    """An internal cross-check failed (oracle mismatch, ancilla residual)."""
