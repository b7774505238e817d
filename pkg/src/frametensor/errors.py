"""Exception hierarchy shared by all modules."""


class FrameTensorError(Exception):
    """Base class for library errors."""


class InvalidArgumentError(FrameTensorError, ValueError):
    pass


class CapacityError(FrameTensorError):
    """Requested object exceeds the configured size cap."""


class OutOfDomainError(FrameTensorError, KeyError):
    """A table weight was queried outside the box it stores."""

    def __str__(self) -> str:
        return Exception.__str__(self)


class PreconditionError(FrameTensorError):
    pass


class SingularityError(FrameTensorError):
    """Matrix is singular or too ill-conditioned to invert reliably."""

    def __init__(self, message: str, condition: float):
        super().__init__(message)
        self.condition = condition


class NotAFrameError(FrameTensorError):
    pass
