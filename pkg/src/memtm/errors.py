"""Exception hierarchy shared by every module."""

from __future__ import annotations

from typing import Any


class MemtmError(Exception):
    """Base class for all errors raised by this package."""


# history store


class NonMonotonicTimestamp(MemtmError):
    def __init__(self, position: int, timestamp: int, last: int):
        super().__init__(
            f"timestamp {timestamp} at position {position} is not after last write at {last}"
        )
        self.position = position
        self.timestamp = timestamp
        self.last = last


class UnknownSymbol(MemtmError):
    def __init__(self, symbol: str):
        super().__init__(f"symbol {symbol!r} is not in the alphabet")
        self.symbol = symbol


class IntegrityViolation(MemtmError):
    def __init__(self, entry: Any, index: int | None = None):
        where = f" (entry #{index})" if index is not None else ""
        super().__init__(f"checksum mismatch on {entry!r}{where}")
        self.entry = entry
        self.index = index


class StoreNotEmpty(MemtmError):
    pass


class IndexOutOfRange(MemtmError):
    pass


# machine definitions


class MachineSyntaxError(MemtmError):
    """Malformed line in a machine file. ``line`` is 1-based."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UndeclaredStateOrSymbol(MemtmError):
    pass


class DuplicateRule(MemtmError):
    pass


class MissingHeader(MemtmError):
    pass


class RuleOnHaltingState(MemtmError):
    pass


# simulation


class UndefinedTransition(MemtmError):
    """The machine is stuck: no rule for the current (state, symbol)."""

    def __init__(self, config: Any, trace: list | None = None):
        super().__init__(f"no transition from {config}")
        self.config = config
        self.trace = trace if trace is not None else []


class StepLimitExceeded(MemtmError):
    """The step budget ran out before a halting state was reached.

    ``trace`` holds every record produced up to and including the last step.
    """

    def __init__(self, max_steps: int, trace: list | None = None):
        super().__init__(f"no halt within {max_steps} steps")
        self.max_steps = max_steps
        self.trace = trace if trace is not None else []


# threshold / bench


class ProgramExhausted(MemtmError):
    pass


class InsufficientSamples(MemtmError):
    pass
