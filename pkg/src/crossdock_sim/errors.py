"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid model or experiment configuration.

    The message lists every violated field so a bad config file can be
    fixed in one pass.
    """


class SimulationLogicError(RuntimeError):
    """Internal inconsistency in a running replication (e.g. scheduling
    into the past, releasing an idle resource). Always a bug, never a
    user error."""


class InsufficientDataError(ValueError):
    """A statistic was requested from fewer observations than it needs."""


class ComparisonError(ValueError):
    """Two configs offered for comparison differ in non-decision fields,
    so any observed difference would be confounded."""
