"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A configuration value is missing, unknown, or out of range."""


class NumericalError(RuntimeError):
    """A numerical routine produced NaN/Inf or a failed solve.

    Carries ``iteration`` when the failure happened inside an iterative loop.
    """

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration
