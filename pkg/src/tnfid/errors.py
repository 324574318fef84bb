"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Bad arguments or malformed inputs detected before any computation."""


class DimensionError(ValidationError):
    """Tensor extents do not match the operation's requirements."""


class StateError(ValidationError):
    """A tensor-network state does not satisfy a required precondition,
    e.g. a fidelity routine was handed a non-canonical MPS."""


class DegenerateStateError(ValidationError):
    """The state has zero norm, or an operation truncated it to nothing."""


class CapacityError(ValidationError):
    """A brute-force routine was asked for more amplitudes than the guard allows."""


class LoadError(ValidationError):
    """A network container on disk is missing, corrupt, or inconsistent."""


class NumericError(ArithmeticError):
    """A numerical routine failed: SVD non-convergence, NaN/Inf, or an
    internal cross-check disagreed beyond tolerance."""


class NotPositiveSemidefiniteError(NumericError):
    """A matrix required to be PSD has an eigenvalue below the clip tolerance."""
