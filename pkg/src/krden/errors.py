"""Error types shared by the library and mapped to CLI exit codes."""


class KrdenError(Exception):
    exit_code = 1


class InvalidInput(KrdenError, ValueError):
    exit_code = 2


class BudgetExceeded(KrdenError):
    exit_code = 3


class NotStabilized(KrdenError):
    """Consecutive depths or node sets disagree; both candidates are attached."""

    exit_code = 3

    def __init__(self, message: str, first: object = None, second: object = None):
        super().__init__(message)
        self.first = first
        self.second = second


class InconsistentInput(KrdenError, ValueError):
    exit_code = 2
