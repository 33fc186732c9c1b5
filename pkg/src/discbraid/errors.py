"""Exception types shared across the package."""


class InputError(ValueError):
    """Caller passed arguments outside an operation's stated domain."""


class DegenerateConfigurationError(RuntimeError):
    """A geometric computation hit a non-generic configuration.

    Carries the parameter time at which the degeneracy was detected, so
    callers can retry with a perturbed projection direction.
    """

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class DegeneracyError(RuntimeError):
    """Monte Carlo sampling rejected too many configurations to trust."""
