"""Exception types shared across the package.

The CLI maps these onto exit codes (configuration -> 2, data -> 3,
resource -> 4), so library code should prefer them over bare ValueError
whenever the failure class is known.
"""


class DataError(ValueError):
    """Invalid or unusable input data (bad shapes, non-finite values, CSV rows)."""


class DegenerateSampleError(DataError):
    """A sample that cannot support estimation (too few rows, zero spread)."""


class ConfigurationError(ValueError):
    """An unsupported combination of options or a violated parameter constraint."""


class ResourceLimitError(RuntimeError):
    """A computation would exceed the configured size guards."""
