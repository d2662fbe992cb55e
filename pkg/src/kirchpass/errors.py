"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Bad user input: grid parameters, config files, schema violations."""


class GridMismatchError(ValueError):
    """A field or sample vector does not belong to the grid it is used with."""


class ShiftViolationError(ValueError):
    """The shifted potential dips below 1 somewhere; the shift constant was too small."""


class UnshiftedSpecError(ValueError):
    """An operation that requires a shifted problem received an unshifted one."""


class NegativePointNotFoundError(RuntimeError):
    """No scaling of the scan direction reached negative energy below t_max."""


class PathCollapseError(RuntimeError):
    """The deformed path's maximum fell below the certified sphere level."""


class LinearSolveError(RuntimeError):
    """The discrete H-inner-product system could not be factored or solved."""
