"""Exception hierarchy. The CLI maps each family onto an exit code."""


class SSWMError(Exception):
    exit_code = 1


class ConfigError(SSWMError, ValueError):
    """Bad preset name, malformed config file or invalid parameter values."""

    exit_code = 2


class NumericPreconditionError(SSWMError, ValueError):
    exit_code = 3


class GridError(NumericPreconditionError):
    """Degenerate or non power-of-two frequency lattice."""


class GridTooCoarseError(NumericPreconditionError):
    pass


class ResourceError(NumericPreconditionError):
    pass


class OverdampedError(NumericPreconditionError):
    """Dressing radicand is non-positive, so no closed-form splitting exists."""


class QuantityError(NumericPreconditionError):
    pass


class InvariantError(SSWMError, AssertionError):
    exit_code = 4
