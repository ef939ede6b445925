"""Exception taxonomy shared across the package.

Each class maps to a distinct CLI exit code (see cli.py), so library code
should raise these rather than bare ValueError/RuntimeError.
"""


class InputError(ValueError):
    """A caller-supplied value is malformed or outside its domain."""


class ConfigError(ValueError):
    """A configuration is internally contradictory or incomplete."""


class CapacityError(RuntimeError):
    """A requested computation exceeds a configured size ceiling."""
