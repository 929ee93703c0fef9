class DLPError(Exception):
    """Base class for domain errors raised by the engine."""


class DuplicateName(DLPError):
    pass


class UnknownTheory(DLPError):
    pass


class UnknownId(DLPError):
    pass


class EmptyPremises(DLPError):
    pass


class UnsafeRule(DLPError):
    """A rule conclusion mentions a variable no premise can bind."""


class CycleDetected(DLPError):
    pass


class NotGroundBoolean(DLPError):
    pass


class ParseError(DLPError):
    def __init__(self, line: int, column: int, expected: str, found: str = ""):
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        msg = f"{line}:{column}: expected {expected}"
        if found:
            msg += f", found {found}"
        super().__init__(msg)
