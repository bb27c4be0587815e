"""Exception hierarchy shared by the library and the CLI."""


class StakePowerError(ValueError):
    """Base class for all library errors."""


class DegenerateStakesError(StakePowerError):
    """Raised when a stake profile has no positive entry."""


class EnumerationLimitError(StakePowerError):
    """Raised when exact enumeration is requested for too many agents."""


class ZeroStakePivotError(StakePowerError):
    """Raised when an agent with zero weight is reported as pivotal."""


class NumericalError(StakePowerError):
    """Raised when a numerical routine fails a diagnostic guard."""


class StakeDataError(StakePowerError):
    """Raised for unreadable or unusable stake/project input files."""
