"""Exception hierarchy shared by every module of the package."""


class CQExpError(Exception):
    """Base class for all errors raised by cqexp."""


class InputError(CQExpError, ValueError):
    """An argument violates a documented precondition."""


class SingularityError(CQExpError, ValueError):
    """A negative power or inverse was requested of a singular operator."""


class DomainError(CQExpError, ValueError):
    """A scalar function was evaluated outside its domain."""


class NonConvergenceError(CQExpError, RuntimeError):
    """An iterative limit did not settle.

    ``iterates`` holds the last two iterates so the caller can inspect them.
    """

    def __init__(self, message, iterates=()):
        super().__init__(message)
        self.iterates = tuple(iterates)


class GeneratorError(CQExpError, RuntimeError):
    """A random instance generator could not satisfy its constraints."""
