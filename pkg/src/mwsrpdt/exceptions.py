"""Exception types shared across the package."""


class MwsrpdtError(Exception):
    """Base class for all package errors."""


class EmptySolution(MwsrpdtError):
    pass


class InvalidConfig(MwsrpdtError, ValueError):
    pass


class ParseError(MwsrpdtError, ValueError):
    """Malformed instance or solution file.

    ``line`` is 1-based, or ``None`` when the problem is end-of-file.
    """

    def __init__(self, reason, line=None):
        self.reason = reason
        self.line = line
        where = f"line {line}" if line is not None else "end of file"
        super().__init__(f"{where}: {reason}")


class StalledDay(MwsrpdtError):
    """A full day passed without executing any task although tasks remain."""


class DegenerateWeights(UserWarning):
    """All selection weights vanished; selection fell back to uniform."""


class InfeasibleInput(MwsrpdtError):
    pass


class BudgetExceeded(MwsrpdtError):
    pass
