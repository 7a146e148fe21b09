"""Exception hierarchy shared across the package.

Each class maps to one CLI exit code; see cli.main.
"""


class AbqsimError(Exception):
    """Base class for all package errors."""


class ConfigurationError(AbqsimError):
    """Invalid parameters, grids, or input files (exit code 2)."""


class ScenarioError(ConfigurationError):
    """A scenario's physical preconditions are violated (exit code 2)."""


class NumericalFailure(AbqsimError):
    """A propagation run broke its numerical contract (exit code 3)."""
