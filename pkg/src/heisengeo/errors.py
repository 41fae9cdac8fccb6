class HeisenbergError(ValueError):
    """Base class for all errors raised by heisengeo."""


class DimensionError(HeisenbergError):
    pass


class InvalidNormError(HeisenbergError):
    """Raised when a norm descriptor is not a homogeneous norm at the requested dimension.

    ``threshold`` carries the largest admissible ``a`` for the descriptor's ``p``.
    """

    def __init__(self, message, threshold=None):
        super().__init__(message)
        self.threshold = threshold


class CurveError(HeisenbergError):
    pass
