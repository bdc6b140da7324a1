"""Exception hierarchy shared by the protocol, the simulator and the CLI."""

from typing import Optional


class GossipError(Exception):
    """Base class for every error raised by this project."""


class SuspicionRangeError(GossipError, ValueError):
    """A suspicion value could not be brought into the [0, 5] range."""


class InvalidParamsError(GossipError, ValueError):
    """A protocol parameter invariant is violated.

    `code` is stable and names the violated invariant, e.g. "n_too_small".
    """

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


class StructuralError(GossipError, ValueError):
    """A packet or vector does not fit the receiving state (owner, sender or length)."""


class ScenarioError(GossipError, ValueError):
    """A scenario violates one of its invariants (coverage, partitions, schedule)."""


class ScenarioConfigError(GossipError):
    """A scenario file could not be parsed. Names the offending key and line."""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        location = ""
        if key is not None:
            location += f"key '{key}'"
        if line is not None:
            location += f"{' ' if location else ''}(line {line})"
        super().__init__(f"{location}: {message}" if location else message)
        self.key = key
        self.line = line
        self.message = message


class TraceFormatError(GossipError):
    """A persisted trace line could not be decoded."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
