"""Exception hierarchy shared across the toolkit.

Each exception carries the process exit code used by the command line
front end, so library errors map onto stable machine-readable statuses.
"""


class SptError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ValidationError(SptError):
    """Malformed or inconsistent input data (tables, matrices, JSON)."""

    exit_code = 1


class BrokenSymmetryError(SptError):
    """The on-site group action is not a symmetry of the state."""

    exit_code = 2

    def __init__(self, message, element=None, eigenvalue=None):
        super().__init__(message)
        self.element = element
        self.eigenvalue = eigenvalue


class SnapError(SptError):
    """A numerically extracted phase has no nearby exact root of unity."""

    exit_code = 3


class ClassificationError(SptError):
    """Multiplier extraction or cohomology classification failed."""

    exit_code = 3


class ResourceGuardError(SptError):
    """A desk-scale complexity guard was exceeded."""

    exit_code = 4


class NonInjectiveError(SptError):
    """Transfer operator has a degenerate leading eigenvalue."""

    exit_code = 2
