"""Machine definitions, the ``.tm`` file format, traces, and the direct-tape oracle.

File format (UTF-8, ``#`` starts a comment)::

    machine succ
    blank _
    start A
    halt H
    A 0 -> A 0 R
    A _ -> B _ L

Optional ``states <q>...`` and ``alphabet <sym>...`` lines pin the declared
sets; rules may then only use what was declared.  Without them both sets are
inferred from the headers and rules.
"""

from __future__ import annotations

import enum
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType

from memtm.errors import (
    DuplicateRule,
    MachineSyntaxError,
    MissingHeader,
    RuleOnHaltingState,
    StepLimitExceeded,
    UndeclaredStateOrSymbol,
    UndefinedTransition,
    UnknownSymbol,
)

MOVES = {"L": -1, "S": 0, "R": 1}
MOVE_NAMES = {v: k for k, v in MOVES.items()}

Action = tuple[str, str, int]


class Signal(enum.Enum):
    HALT = "halt"
    UNDEFINED = "undefined"


@dataclass(frozen=True)
class MachineSpec:
    name: str
    states: frozenset[str]
    alphabet: frozenset[str]
    blank: str
    start: str
    halting: frozenset[str]
    rules: Mapping[tuple[str, str], Action] = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "rules", MappingProxyType(dict(self.rules)))
        if self.blank not in self.alphabet:
            raise UndeclaredStateOrSymbol(f"blank {self.blank!r} not in alphabet")
        if self.start not in self.states:
            raise UndeclaredStateOrSymbol(f"start state {self.start!r} not declared")
        if not self.halting:
            raise MissingHeader("at least one halting state is required")
        if not self.halting <= self.states:
            raise UndeclaredStateOrSymbol(f"halting states {sorted(self.halting - self.states)} not declared")
        for (q, a), (q2, b, d) in self.rules.items():
            for s in (q, q2):
                if s not in self.states:
                    raise UndeclaredStateOrSymbol(f"state {s!r} not declared")
            for s in (a, b):
                if s not in self.alphabet:
                    raise UndeclaredStateOrSymbol(f"symbol {s!r} not declared")
            if q in self.halting:
                raise RuleOnHaltingState(f"rule keyed on halting state {q!r}")
            if d not in MOVE_NAMES:
                raise ValueError(f"move must be -1, 0 or +1, got {d}")

    @property
    def symbol_bits(self) -> int:
        return max(1, (len(self.alphabet) - 1).bit_length())

    def check_input(self, symbols: Sequence[str]) -> None:
        for s in symbols:
            if s not in self.alphabet:
                raise UnknownSymbol(s)

    def to_text(self) -> str:
        lines = [
            f"machine {self.name}",
            f"blank {self.blank}",
            f"start {self.start}",
            "halt " + " ".join(sorted(self.halting)),
        ]
        for (q, a), (q2, b, d) in self.rules.items():
            lines.append(f"{q} {a} -> {q2} {b} {MOVE_NAMES[d]}")
        return "\n".join(lines) + "\n"


def delta(spec: MachineSpec, state: str, symbol: str) -> Action | Signal:
    if state in spec.halting:
        return Signal.HALT
    return spec.rules.get((state, symbol), Signal.UNDEFINED)


@dataclass(frozen=True, slots=True)
class Configuration:
    state: str
    head: int
    under_head: str
    step: int


@dataclass(frozen=True, slots=True)
class TraceRecord:
    config: Configuration
    halted: bool

    def line(self) -> str:
        c = self.config
        return f"{c.step}\t{c.state}\t{c.head}\t{c.under_head}\t{int(self.halted)}"

    @classmethod
    def parse(cls, line: str) -> TraceRecord:
        t, q, p, a, h = line.rstrip("\n").split("\t")
        return cls(Configuration(q, int(p), a, int(t)), h == "1")


def format_trace(records: Sequence[TraceRecord]) -> str:
    return "".join(r.line() + "\n" for r in records)


def _symbol(tok: str, lineno: int) -> str:
    if len(tok) != 1:
        raise MachineSyntaxError(lineno, f"symbols are single characters, got {tok!r}")
    return tok


def parse_machine(text: str, name: str | None = None) -> MachineSpec:
    headers: dict[str, object] = {}
    declared_states: set[str] | None = None
    declared_alphabet: set[str] | None = None
    rules: dict[tuple[str, str], Action] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        key = toks[0]
        if len(toks) == 6 and toks[2] == "->":
            q, a, _, q2, b, m = toks
            if m not in MOVES:
                raise MachineSyntaxError(lineno, f"move must be L, R or S, got {m!r}")
            k = (q, _symbol(a, lineno))
            if k in rules:
                raise DuplicateRule(f"line {lineno}: second rule for ({q}, {a})")
            rules[k] = (q2, _symbol(b, lineno), MOVES[m])
        elif key in ("machine", "blank", "start"):
            if len(toks) != 2:
                raise MachineSyntaxError(lineno, f"'{key}' takes exactly one argument")
            if key in headers:
                raise MachineSyntaxError(lineno, f"repeated '{key}' header")
            headers[key] = _symbol(toks[1], lineno) if key == "blank" else toks[1]
        elif key == "halt":
            if len(toks) < 2:
                raise MachineSyntaxError(lineno, "'halt' needs at least one state")
            headers.setdefault("halt", set()).update(toks[1:])  # type: ignore[union-attr]
        elif key == "states":
            declared_states = (declared_states or set()) | set(toks[1:])
        elif key == "alphabet":
            declared_alphabet = (declared_alphabet or set()) | {_symbol(t, lineno) for t in toks[1:]}
        else:
            raise MachineSyntaxError(lineno, f"unrecognised line {raw.strip()!r}")

    for required in ("blank", "start", "halt"):
        if required not in headers:
            raise MissingHeader(f"missing '{required}' header")
    blank = headers["blank"]
    start = headers["start"]
    halting = frozenset(headers["halt"])  # type: ignore[arg-type]

    used_states = {start, *halting} | {q for q, _ in rules} | {q for q, _, _ in rules.values()}
    used_symbols = {blank} | {a for _, a in rules} | {b for _, b, _ in rules.values()}
    if declared_states is not None:
        missing = used_states - declared_states
        if missing:
            raise UndeclaredStateOrSymbol(f"undeclared states: {sorted(missing)}")
        states = declared_states
    else:
        states = used_states
    if declared_alphabet is not None:
        missing = used_symbols - declared_alphabet
        if missing:
            raise UndeclaredStateOrSymbol(f"undeclared symbols: {sorted(missing)}")
        alphabet = declared_alphabet
    else:
        alphabet = used_symbols

    return MachineSpec(
        name=str(headers.get("machine", name or "unnamed")),
        states=frozenset(states),
        alphabet=frozenset(alphabet),
        blank=str(blank),
        start=str(start),
        halting=halting,
        rules=rules,
    )


def load_machine(path: str | Path) -> MachineSpec:
    path = Path(path)
    return parse_machine(path.read_text(encoding="utf-8"), name=path.stem)


class DirectRun:
    """Conventional simulator: the tape is a dict of cells, blank by default."""

    def __init__(self, spec: MachineSpec, symbols: Sequence[str]):
        spec.check_input(symbols)
        self.spec = spec
        self.tape: dict[int, str] = {i: s for i, s in enumerate(symbols)}
        self.state = spec.start
        self.head = 0
        self.step_count = 0

    def cell(self, position: int) -> str:
        return self.tape.get(position, self.spec.blank)

    @property
    def config(self) -> Configuration:
        return Configuration(self.state, self.head, self.cell(self.head), self.step_count)

    def record(self) -> TraceRecord:
        return TraceRecord(self.config, self.state in self.spec.halting)

    def step(self) -> Action | Signal:
        action = delta(self.spec, self.state, self.cell(self.head))
        if isinstance(action, Signal):
            return action
        q2, b, d = action
        self.tape[self.head] = b
        self.head += d
        self.state = q2
        self.step_count += 1
        return action

    def span(self) -> tuple[int, int] | None:
        """Inclusive bounds of non-blank cells, or None for an all-blank tape."""
        used = [p for p, s in self.tape.items() if s != self.spec.blank]
        return (min(used), max(used)) if used else None

    def tape_string(self, lo: int, hi: int) -> str:
        return "".join(self.cell(p) for p in range(lo, hi + 1))


def drive(run, max_steps: int) -> Iterator[TraceRecord]:
    """Shared stopping contract for both substrates.

    Yields the record for step 0 and every step after it.  Stops after a
    halting record; raises :class:`UndefinedTransition` or
    :class:`StepLimitExceeded` otherwise.  The raised errors carry an empty
    trace; :func:`collect` fills it in.
    """
    if max_steps < 1:
        raise ValueError(f"max_steps must be positive, got {max_steps}")
    return _drive(run, max_steps)


def _drive(run, max_steps: int) -> Iterator[TraceRecord]:
    while True:
        rec = run.record()
        yield rec
        if rec.halted:
            return
        if rec.config.step >= max_steps:
            raise StepLimitExceeded(max_steps)
        if run.step() is Signal.UNDEFINED:
            raise UndefinedTransition(rec.config)


def collect(records: Iterator[TraceRecord]) -> list[TraceRecord]:
    out: list[TraceRecord] = []
    try:
        for rec in records:
            out.append(rec)
    except (StepLimitExceeded, UndefinedTransition) as exc:
        exc.trace = out
        raise
    return out


def iter_direct(spec: MachineSpec, symbols: Sequence[str], max_steps: int) -> Iterator[TraceRecord]:
    return drive(DirectRun(spec, symbols), max_steps)


def run_direct(spec: MachineSpec, symbols: Sequence[str], max_steps: int) -> list[TraceRecord]:
    return collect(iter_direct(spec, symbols, max_steps))
