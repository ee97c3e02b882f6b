"""Exception types shared across the package.

Configuration problems (bad grids, malformed manifests) raise ConfigError or
FormatError and map to exit code 2 in the CLI; numerical failures
(unbracketed roots, exhausted ramp budgets) map to exit code 3.
"""


class PierbeamError(Exception):
    pass


class ConfigError(PierbeamError):
    """Invalid user input: empty grids, out-of-range parameters, bad keys."""


class FormatError(PierbeamError):
    """A data file (CSV manifest, grid file) could not be parsed."""


class RootNotBracketed(PierbeamError):
    """A scalar root search failed to find a sign change."""


class BudgetExceeded(PierbeamError):
    """An amplitude ramp passed its energy cap without detecting anything."""
