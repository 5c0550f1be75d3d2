"""Exception hierarchy shared by every engine.

The CLI maps these onto exit codes: precondition and configuration problems
exit with 2, resource limits with 3, consistency failures with 1.
"""


class KacBPSError(Exception):
    exit_code = 1


class PreconditionError(KacBPSError, ValueError):
    exit_code = 2


class DimensionMismatchError(PreconditionError):
    pass


class ConfigurationError(PreconditionError):
    pass


class QuiverParseError(PreconditionError):
    pass


class ResourceLimitError(KacBPSError, RuntimeError):
    exit_code = 3


class ConsistencyError(KacBPSError, AssertionError):
    """Two routes that must agree did not."""

    exit_code = 1
