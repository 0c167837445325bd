"""Exception types shared across the engine."""
from __future__ import annotations


class EngineError(Exception):
    pass


class DomainError(EngineError):
    """A domain was used outside its contract (e.g. exhaustive enumeration
    requested on an unbounded domain)."""


class PayloadError(EngineError):
    """A payload oracle failed at a position: missing entry or a value
    outside the assigned family domain."""

    def __init__(self, index, position, detail: str = ""):
        self.index = index
        self.position = position
        msg = f"malformed payload at ({index}, {position})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class MachineError(EngineError):
    pass


class StateCapExceeded(EngineError):
    """Unfold exploration exceeded the reachable-state cap; the coalgebra
    element is not (known to be) regular within budget."""


class RetractionError(EngineError):
    """Retraction evidence failed for a carrier element and child position."""

    def __init__(self, d, q):
        self.d = d
        self.q = q
        super().__init__(f"retraction evidence failed at ({d}, {q})")


class ParseError(EngineError):
    """Position-tagged syntax error in the declaration DSL or a spec file."""

    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


class ValueParseError(EngineError):
    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"offset {offset}: {message}")


class ElaborationError(EngineError):
    pass
