"""Turing machine simulation on top of an append-only write history.

The tape never exists as an array inside :mod:`memtm.kernel`; every cell is
recovered from timestamped writes held in a :class:`~memtm.history.HistoryStore`.
A conventional direct-tape simulator in :mod:`memtm.machine` serves as the
oracle the kernel is checked against.
"""

from memtm.errors import (
    DuplicateRule,
    IndexOutOfRange,
    InsufficientSamples,
    IntegrityViolation,
    MachineSyntaxError,
    MemtmError,
    MissingHeader,
    NonMonotonicTimestamp,
    ProgramExhausted,
    RuleOnHaltingState,
    StepLimitExceeded,
    StoreNotEmpty,
    UndeclaredStateOrSymbol,
    UndefinedTransition,
    UnknownSymbol,
)
from memtm.history import HistoryEntry, HistoryStore
from memtm.kernel import KernelState, reconstruct_tape, run_kernel
from memtm.machine import Configuration, MachineSpec, TraceRecord, parse_machine, run_direct

__all__ = [
    "Configuration",
    "DuplicateRule",
    "HistoryEntry",
    "HistoryStore",
    "IndexOutOfRange",
    "InsufficientSamples",
    "IntegrityViolation",
    "KernelState",
    "MachineSpec",
    "MachineSyntaxError",
    "MemtmError",
    "MissingHeader",
    "NonMonotonicTimestamp",
    "ProgramExhausted",
    "RuleOnHaltingState",
    "StepLimitExceeded",
    "StoreNotEmpty",
    "TraceRecord",
    "UndeclaredStateOrSymbol",
    "UndefinedTransition",
    "UnknownSymbol",
    "parse_machine",
    "reconstruct_tape",
    "run_direct",
    "run_kernel",
]
