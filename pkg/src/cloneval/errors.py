"""Exception types shared across the package."""


class ClonevalError(Exception):
    """Base class for all package errors."""


class LexError(ClonevalError):
    """A file could not be tokenized. Carries a 1-based source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} at {line}:{col}")
        self.line = line
        self.col = col


class UnterminatedString(LexError):
    pass


class UnterminatedComment(LexError):
    pass


class InvalidCharacter(LexError):
    pass


class ParseError(ClonevalError):
    """Method body could not be summarized."""


class FileNotFound(ClonevalError):
    pass


class NoMatchingMethod(ClonevalError):
    """No extracted method overlaps the requested line span well enough."""


class InvalidThreshold(ClonevalError):
    pass


class InvalidParameter(ClonevalError):
    pass


class NoVotes(ClonevalError):
    pass


class InsufficientPairs(ClonevalError):
    def __init__(self, requested: int, available: int):
        super().__init__(f"requested {requested} pairs, only {available} available")
        self.requested = requested
        self.available = available


class IncompleteExperiment(ClonevalError):
    def __init__(self, unresolved):
        super().__init__(f"{len(unresolved)} pairs without a terminal outcome")
        self.unresolved = list(unresolved)


class EmptyIntersection(ClonevalError):
    pass


class DegenerateData(ClonevalError):
    pass


class NonConvergence(ClonevalError):
    pass


class VersionMismatch(ClonevalError):
    pass


class ModelUnavailable(ClonevalError):
    pass


class UnknownJudge(ClonevalError):
    pass


class IllegalCloneType(ClonevalError):
    pass


class MalformedRow(ClonevalError):
    pass


class MalformedCSV(ClonevalError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnknownTool(ClonevalError):
    pass


class EmptyAfterFilter(ClonevalError):
    pass


class UnregisteredUser(ClonevalError):
    pass


class ExperimentComplete(ClonevalError):
    pass


class TaskNotFound(ClonevalError):
    pass


class NotComplete(ClonevalError):
    def __init__(self, done: int, total: int):
        super().__init__(f"experiment not complete: {done}/{total} tasks done")
        self.done = done
        self.total = total


class MissingVerdict(ClonevalError):
    def __init__(self, keys):
        super().__init__(
            "missing human verdicts for: " + ", ".join(str(k) for k in keys)
        )
        self.keys = list(keys)
