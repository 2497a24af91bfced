"""Exception types shared across the package."""


class StratcalcError(Exception):
    """Base class for every error raised by this package."""


class InputError(StratcalcError):
    """User-supplied data is malformed or violates a precondition."""


class ValidationError(StratcalcError):
    """A mathematical side condition failed for the given inputs."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class StructuralError(StratcalcError):
    """A required structural property (continuity, cone-point preservation,
    derivability) does not hold for the given data."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InternalInvariantError(StratcalcError):
    """A condition that holds by construction was violated; indicates a bug."""


class NumericError(StratcalcError):
    """Numeric evaluation failed: domain error, overflow, non-finite result."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class UnsupportedPrecisionError(StratcalcError):
    """The requested derivative order exceeds what iterated finite
    differences can certify; only orders 1 and 2 are supported."""
