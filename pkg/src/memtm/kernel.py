"""Simulation from a single maintained configuration plus the write history.

There is no tape here.  A step reads the configuration ``(q, p, a, t)``,
applies the transition ``(q', a', d)``, appends the write ``(p, a', t+1)``,
moves to ``p + d`` and asks the history what lies there at time ``t+1``.
Writing before reading makes a stay move see its own write.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass

from memtm.errors import UndefinedTransition
from memtm.history import HistoryStore
from memtm.machine import (
    Action,
    Configuration,
    MachineSpec,
    Signal,
    TraceRecord,
    collect,
    delta,
    drive,
)


@dataclass(frozen=True)
class Halted:
    """Returned by :func:`step` on a halting configuration; nothing is written."""

    config: Configuration


class KernelState:
    def __init__(self, spec: MachineSpec, config: Configuration, history: HistoryStore):
        self.spec = spec
        self.config = config
        self.history = history

    @classmethod
    def init(cls, spec: MachineSpec, symbols: Sequence[str]) -> KernelState:
        spec.check_input(symbols)
        history = HistoryStore(spec.blank, spec.alphabet)
        history.seed_input(symbols, origin=0)
        config = Configuration(spec.start, 0, history.read_latest(0, 0), 0)
        return cls(spec, config, history)

    def record(self) -> TraceRecord:
        return TraceRecord(self.config, self.config.state in self.spec.halting)

    def step(self) -> Action | Signal:
        q, p, a, t = self.config.state, self.config.head, self.config.under_head, self.config.step
        action = delta(self.spec, q, a)
        if isinstance(action, Signal):
            return action
        q2, written, d = action
        self.history.append_write(p, written, t + 1)
        p2 = p + d
        self.config = Configuration(q2, p2, self.history.read_latest(p2, t + 1), t + 1)
        return action

    def check_invariants(self, input_length: int) -> None:
        c = self.config
        cached = self.history.read_latest(c.head, c.step)
        assert c.under_head == cached, f"cached symbol {c.under_head!r} != history {cached!r}"
        assert len(self.history) == input_length + c.step, "one write per executed step"


def init(spec: MachineSpec, symbols: Sequence[str]) -> KernelState:
    return KernelState.init(spec, symbols)


def step(state: KernelState, spec: MachineSpec | None = None) -> KernelState | Halted:
    """Advance ``state`` in place by one transition.

    Raises :class:`~memtm.errors.UndefinedTransition` when no rule applies.
    """
    if spec is not None and spec != state.spec:
        raise ValueError(f"state belongs to machine {state.spec.name!r}, not {spec.name!r}")
    config = state.config
    outcome = state.step()
    if outcome is Signal.HALT:
        return Halted(config)
    if outcome is Signal.UNDEFINED:
        raise UndefinedTransition(config)
    return state


def iter_kernel(spec: MachineSpec, symbols: Sequence[str], max_steps: int) -> Iterator[TraceRecord]:
    return drive(KernelState.init(spec, symbols), max_steps)


def run_kernel(spec: MachineSpec, symbols: Sequence[str], max_steps: int) -> list[TraceRecord]:
    return collect(iter_kernel(spec, symbols, max_steps))


def reconstruct_tape(state: KernelState, lo: int, hi: int) -> list[str]:
    if lo > hi:
        raise ValueError(f"empty range [{lo}, {hi}]")
    t = state.config.step
    return [state.history.read_latest(p, t) for p in range(lo, hi + 1)]


def visited_span(state: KernelState) -> tuple[int, int]:
    """Inclusive bounds of every written cell and the head."""
    cells = state.history.positions
    head = state.config.head
    if not cells:
        return head, head
    return min(cells[0], head), max(cells[-1], head)


def tape_line(state: KernelState, lo: int, hi: int) -> str:
    return f"tape\t{lo}\t{hi}\t{''.join(reconstruct_tape(state, lo, hi))}"
