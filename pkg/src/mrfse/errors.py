"""Exception hierarchy shared by every module."""


class MRFError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ArgumentError(MRFError, ValueError):
    """An argument violates an operation's precondition."""

    exit_code = 2


class FormatError(MRFError, ValueError):
    """Input data is malformed."""

    exit_code = 3


class InsufficientDataError(FormatError):
    """Input data is well formed but too short for the operation."""


class UndefinedConditionalError(MRFError, KeyError):
    """A conditional was requested on a configuration with no mass."""

    exit_code = 3

    def __str__(self):
        return str(self.args[0]) if self.args else "undefined conditional"


class CapacityError(MRFError):
    """A hard size limit (alphabet size, enumeration width) was exceeded."""

    exit_code = 4
