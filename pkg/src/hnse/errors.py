class GridMismatchError(ValueError):
    """Two fields or grids that must agree do not."""


class OutOfBandError(ValueError):
    """A dilation moved nonzero mass outside the lambda band."""


class HermiteAccuracyError(ValueError):
    """A quadrature failed its orthonormality bound, or a kernel was queried outside its window."""


class SymbolError(ValueError):
    pass


class ConstraintError(ValueError):
    """Divergence-free or truncation pre-check failed."""


class CFLError(ValueError):
    pass


class EstimatorError(ValueError):
    pass


class NumericalAbort(RuntimeError):
    """Non-finite state encountered while stepping."""

    def __init__(self, message: str, dump_path: str | None = None):
        super().__init__(message)
        self.dump_path = dump_path
