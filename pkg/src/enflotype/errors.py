"""Exception taxonomy shared by the library and the command line tool.

The command line tool maps these onto process exit codes: usage and
input problems exit with 2, capacity refusals with 3.  Inequality
violations found by a verification run are not exceptions; they are
reported and exit with 1.
"""


class UsageError(ValueError):
    """The caller violated a documented precondition."""


class InvalidInputError(ValueError):
    """Input data is malformed: wrong shape, wrong domain, or non-finite."""


class CapacityError(RuntimeError):
    """An exhaustive enumeration would exceed the configured cap."""


class InternalError(RuntimeError):
    """An internal consistency check failed.  Indicates a bug, not bad input."""
