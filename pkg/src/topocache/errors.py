"""Exception hierarchy shared by every module of the package."""


class TopoCacheError(Exception):
    """Base class for all errors raised by topocache."""


class InvalidArgumentError(TopoCacheError, ValueError):
    """An argument violates a documented precondition."""


class UndefinedDoFError(TopoCacheError, ZeroDivisionError):
    """Degrees of freedom requested for a zero delivery time."""


class DecodeError(TopoCacheError):
    """A user could not recover one of its requested subfiles.

    Attributes
    ----------
    user : int
        The user (1-based) that failed to decode.
    subfile : object
        The subfile identifier that could not be recovered.
    """

    def __init__(self, user, subfile, reason=""):
        self.user = user
        self.subfile = subfile
        msg = f"user {user} cannot decode subfile {subfile}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class ResourceLimitError(TopoCacheError):
    """An exhaustive enumeration would exceed its configured budget."""
