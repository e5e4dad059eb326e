"""Exception types shared across the package."""


class CapacityError(MemoryError):
    """A requested computation exceeds its configured memory budget."""


class ParameterError(ValueError):
    """A parameter is outside its documented range."""


class InputError(ValueError):
    """Structured input (records, grids, config) is malformed or incomplete."""


class NumericalError(RuntimeError):
    """An iterative solver failed to converge within its iteration cap.

    Carries the relative residual reached when the solver gave up.
    """

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
