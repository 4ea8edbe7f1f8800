"""Exception hierarchy shared across the package."""


class CombssError(Exception):
    """Base class for all errors raised by this package."""


class InputError(CombssError, ValueError):
    """Malformed input data or configuration (CLI exit code 2)."""


class NumericalError(CombssError, ArithmeticError):
    """Numerical failure during a fit (CLI exit code 3)."""


class DimensionMismatch(InputError):
    pass


class NonFiniteEntry(InputError):
    def __init__(self, row, col=None):
        self.row = row
        self.col = col
        where = f"x at row {row}, column {col}" if col is not None else f"y at row {row}"
        super().__init__(f"non-finite entry in {where}")


class InvalidDimension(InputError):
    pass


class InvalidConfig(InputError):
    pass


class EmptyResponse(InputError):
    pass


class DimensionTooLarge(InputError):
    pass


class NullSignal(InputError):
    pass


class NumericalBreakdown(NumericalError):
    def __init__(self, message, iteration=None):
        self.iteration = iteration
        if iteration is not None:
            message = f"{message} (iteration {iteration})"
        super().__init__(message)


class NonFiniteUpdate(NumericalError):
    def __init__(self, message, iteration=None):
        self.iteration = iteration
        if iteration is not None:
            message = f"{message} (iteration {iteration})"
        super().__init__(message)
