"""Exception hierarchy.

``ConfigError`` subclasses map to CLI exit code 2, ``BudgetError``
subclasses to exit code 3.
"""


class CliqueCoupleError(Exception):
    pass


class ConfigError(CliqueCoupleError):
    pass


class InvalidPattern(ConfigError):
    pass


class InvalidConstants(ConfigError):
    pass


class OutOfRange(ConfigError):
    """A parameter schedule leaves its valid range at the requested n."""


class DivisibilityError(ConfigError):
    pass


class ContractViolation(CliqueCoupleError):
    pass


class ZeroProbabilityCondition(CliqueCoupleError):
    """The conditioning event has probability zero."""


class BudgetError(CliqueCoupleError):
    pass


class CapExceeded(BudgetError):
    pass


class ComponentTooLarge(BudgetError):
    pass
