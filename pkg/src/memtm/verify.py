"""Lockstep checkers comparing the history-backed kernel with the direct-tape oracle.

:func:`check_coherence` compares the two traces record by record.
:func:`check_consistency` asks the history what was on the tape at past
times and compares each answer with a replay of the oracle.
"""

from __future__ import annotations

import random
from collections.abc import Sequence
from dataclasses import dataclass, field

from memtm.errors import MemtmError, UndefinedTransition
from memtm.kernel import KernelState
from memtm.machine import Action, DirectRun, MachineSpec, Signal, TraceRecord

EXHAUSTIVE_BELOW = 1000


@dataclass(frozen=True)
class Fault:
    """Flip ``bit`` of ``field`` in history entry ``index`` just before step ``step + 1`` runs.

    With ``step=None`` the fault lands as soon as the entry exists.
    """

    index: int
    step: int | None = None
    field: str = "symbol"
    bit: int = 0


def _tag(exc: MemtmError, side: str) -> MemtmError:
    exc.side = side  # type: ignore[attr-defined]
    return exc


class _FaultyKernel:
    """KernelState wrapper applying an optional fault at the scheduled moment."""

    def __init__(self, spec: MachineSpec, symbols: Sequence[str], fault: Fault | None):
        try:
            self.state = KernelState.init(spec, symbols)
        except MemtmError as exc:
            raise _tag(exc, "kernel")
        self.fault = fault
        self._maybe_inject()

    def _maybe_inject(self) -> None:
        f = self.fault
        if f is None:
            return
        due = f.index < len(self.state.history) if f.step is None else self.state.config.step >= f.step
        if due:
            try:
                self.state.history.corrupt_entry(f.index, field=f.field, bit=f.bit)
            except MemtmError as exc:
                raise _tag(exc, "kernel")
            self.fault = None

    def step(self) -> Action | Signal:
        try:
            out = self.state.step()
        except MemtmError as exc:
            raise _tag(exc, "kernel")
        self._maybe_inject()
        return out


@dataclass
class CoherenceReport:
    machine: str
    input: str
    steps_checked: int = 0
    first_divergence: tuple[int, TraceRecord, TraceRecord] | None = None

    @property
    def passed(self) -> bool:
        return self.first_divergence is None

    def line(self) -> str:
        if self.passed:
            detail = f"coherence steps={self.steps_checked}"
        else:
            t, k, o = self.first_divergence  # type: ignore[misc]
            detail = f"coherence diverged at t={t} kernel=[{k.line()}] oracle=[{o.line()}]"
        return f"{'PASS' if self.passed else 'FAIL'}\t{self.machine}\t{self.input}\t{detail}"


@dataclass
class ConsistencyReport:
    machine: str
    input: str = ""
    cells_checked: int = 0
    mismatches: list[tuple[int, int, str, str]] = field(default_factory=list)
    exhaustive: bool = False

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def line(self) -> str:
        mode = "exhaustive" if self.exhaustive else "sampled"
        if self.passed:
            detail = f"consistency cells={self.cells_checked} {mode}"
        else:
            p, t, h, o = self.mismatches[0]
            detail = (
                f"consistency {len(self.mismatches)} mismatches, first p={p} t={t} "
                f"history={h!r} oracle={o!r}"
            )
        return f"{'PASS' if self.passed else 'FAIL'}\t{self.machine}\t{self.input}\t{detail}"


def check_coherence(
    spec: MachineSpec,
    symbols: Sequence[str],
    max_steps: int,
    *,
    fault: Fault | None = None,
) -> CoherenceReport:
    if max_steps < 1:
        raise ValueError(f"max_steps must be positive, got {max_steps}")
    report = CoherenceReport(spec.name, "".join(symbols))
    try:
        oracle = DirectRun(spec, symbols)
    except MemtmError as exc:
        raise _tag(exc, "direct")
    kernel = _FaultyKernel(spec, symbols, fault)
    while True:
        k, o = kernel.state.record(), oracle.record()
        report.steps_checked += 1
        if k != o:
            report.first_divergence = (o.config.step, k, o)
            return report
        if o.halted or o.config.step >= max_steps:
            return report
        if oracle.step() is Signal.UNDEFINED:
            raise _tag(UndefinedTransition(o.config), "direct")
        kernel.step()


def check_consistency(
    spec: MachineSpec,
    symbols: Sequence[str],
    max_steps: int,
    probes: int,
    *,
    seed: int = 0,
    exhaustive_below: int = EXHAUSTIVE_BELOW,
    fault: Fault | None = None,
) -> ConsistencyReport:
    """Probe ``read_latest(p, tau)`` for ``tau <= t`` after every kernel step ``t``.

    Each step samples ``probes`` pairs over the cells visited so far and,
    while fewer than ``exhaustive_below`` cells are visited, also checks every
    visited cell at the current time.  If the whole run visits
    fewer than ``exhaustive_below`` cells, every ``(p, tau)`` pair is checked
    once more against the final history.  Expected symbols come from a single
    replay of the oracle, sorted by time.
    """
    if max_steps < 1 or probes < 1:
        raise ValueError("max_steps and probes must be positive")
    rng = random.Random(seed)
    report = ConsistencyReport(spec.name, "".join(symbols))
    kernel = _FaultyKernel(spec, symbols, fault)
    state = kernel.state
    history = state.history

    visited = set(range(len(symbols))) | {0}
    cells: list[int] = sorted(visited)
    # (tau, position, symbol the history returned)
    answers: list[tuple[int, int, str]] = []

    def probe(p: int, tau: int) -> None:
        try:
            answers.append((tau, p, history.read_latest(p, tau)))
        except MemtmError as exc:
            raise _tag(exc, "kernel")

    while True:
        t = state.config.step
        if len(cells) < exhaustive_below:
            for p in cells:
                probe(p, t)
        for _ in range(probes):
            probe(rng.choice(cells), rng.randint(0, t))
        if state.record().halted or t >= max_steps:
            break
        if kernel.step() is Signal.UNDEFINED:
            raise _tag(UndefinedTransition(state.config), "kernel")
        if state.config.head not in visited:
            visited.add(state.config.head)
            cells = sorted(visited)

    final = state.config.step
    if len(visited) < exhaustive_below:
        report.exhaustive = True
        for tau in range(final + 1):
            for p in cells:
                probe(p, tau)

    # one oracle replay answers every probe in time order
    answers.sort(key=lambda a: a[0])
    oracle = DirectRun(spec, symbols)
    for tau, p, got in answers:
        while oracle.step_count < tau:
            if oracle.step() is Signal.UNDEFINED:
                raise _tag(UndefinedTransition(oracle.config), "direct")
        want = oracle.cell(p)
        report.cells_checked += 1
        if got != want:
            report.mismatches.append((p, tau, got, want))
    return report
