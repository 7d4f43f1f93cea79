"""
Exception hierarchy shared by the graph, calculus, oracle and CLI layers
"""


class GenusError(Exception):
    """Base class for every error raised by this project"""


class GraphParseError(GenusError):
    """Edge-list document could not be parsed"""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class GraphValidationError(GenusError):
    """Graph is outside the class the requested pipeline accepts"""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DmtStringError(GraphValidationError):
    """Rooted string is not a dmt-string"""


class TerminalError(GraphValidationError):
    """Terminal pair does not split the graph into three strands"""


class InvariantViolation(GenusError):
    """A run-time invariant failed; this is a bug, not a user error"""


class OracleLimitExceeded(GenusError):
    """Rotation-system census is above the configured limit"""

    def __init__(self, census, limit):
        super().__init__(f"{census} rotation systems exceed the limit of {limit}")
        self.census = census
        self.limit = limit
