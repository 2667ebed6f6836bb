"""A memoryless threshold unit, and what it becomes once paired with stored state.

On its own :func:`threshold_unit` answers one yes/no question about its
input.  Keep its output in a running total and you have a counter; index a
program by that counter and you have a sequencer.  :func:`run_sequenced`
closes the chain by letting a sequencer drive the history-backed kernel.
"""

from __future__ import annotations

from collections.abc import Hashable, Sequence
from dataclasses import dataclass

from memtm.errors import ProgramExhausted
from memtm.kernel import Halted, KernelState, step
from memtm.machine import MachineSpec, TraceRecord


def threshold_unit(x: int) -> int:
    return 1 if x > 0 else 0


@dataclass(frozen=True, slots=True)
class Counter:
    total: int = 0


def counter_increment(c: Counter) -> Counter:
    # the unit only supplies the increment signal; the stored total is the memory
    return Counter(c.total + threshold_unit(1))


@dataclass(frozen=True)
class Sequencer:
    program: tuple[Hashable, ...]
    counter: Counter = Counter()

    @classmethod
    def of(cls, program: Sequence[Hashable]) -> Sequencer:
        return cls(tuple(program))


def sequencer_tick(s: Sequencer) -> tuple[Hashable, Sequencer]:
    if s.counter.total >= len(s.program):
        raise ProgramExhausted(f"program of length {len(s.program)} already finished")
    action = s.program[s.counter.total]
    return action, Sequencer(s.program, counter_increment(s.counter))


STEP = "step"


def run_sequenced(spec: MachineSpec, symbols: Sequence[str], ticks: int) -> list[TraceRecord]:
    """Drive the kernel from a sequencer whose program is ``ticks`` step actions.

    Stops early if the machine halts.  Running out of program is not an
    error here: the trace simply ends.
    """
    seq = Sequencer.of([STEP] * ticks)
    state = KernelState.init(spec, symbols)
    trace = [state.record()]
    while seq.counter.total < len(seq.program):
        action, seq = sequencer_tick(seq)
        assert action == STEP
        if isinstance(step(state, spec), Halted):
            break
        trace.append(state.record())
        if trace[-1].halted:
            break
    return trace
