"""A small universal machine and the encoder/decoder for programs it runs.

The universal machine interprets any two-symbol program (blank plus one mark)
whose states fit a fixed-width binary code.  Its tape looks like::

    [ QQ s ] ;QQs>QQ/bm ;QQs>QQ/bm ... $ 0 0 1 b 1 0 ...
      \\register/ \\------- rules -------/   \\simulated tape/

``QQ`` is the current state code and ``s`` a slot holding the symbol under
the simulated head.  The simulated head cell is marked (``a`` for 0, ``b``
for 1).  One cycle:

1. walk right restoring every mark, fetch the marked cell into the slot;
2. compare the register with each rule bit by bit, marking rule key bits
   ``o``/``i`` on agreement and ``p``/``j`` on disagreement;
3. the first rule with no disagreement is live: its ``>`` becomes ``+`` and
   its next-state bits are copied into the register as ``x``/``y``;
4. write the rule's symbol on the simulated tape and move the mark.

When no rule is live the simulated machine has halted and so does this one.
Halting states are exactly those with no rules, so a stuck program also
stops; :func:`decode` reports the state code so callers can tell them apart.

The simulated tape cannot grow to the left of ``$``: callers pad with
enough blank cells.  Falling off leaves the universal machine stuck, which
surfaces as :class:`~memtm.errors.UndefinedTransition`.
"""

from __future__ import annotations

from dataclasses import dataclass

from memtm.machine import MOVE_NAMES, MachineSpec

BITS = "01"
MATCH = {"0": "o", "1": "i"}
MISS = {"0": "p", "1": "j"}
COPIED = {"0": "x", "1": "y"}
HEAD = {"0": "a", "1": "b"}
RESTORE = {"o": "0", "p": "0", "x": "0", "i": "1", "j": "1", "y": "1", "+": ">"}
UNHEAD = {"a": "0", "b": "1"}

ALPHABET = "[];>/$01oipjxy+abLRS_"
HALT_STATE = "halt"


def _rules() -> dict[tuple[str, str], tuple[str, str, str]]:
    rules: dict[tuple[str, str], tuple[str, str, str]] = {}

    def r(q: str, sym: str, q2: str, write: str | None, move: str) -> None:
        assert (q, sym) not in rules, (q, sym)
        rules[(q, sym)] = (q2, sym if write is None else write, move)

    def sweep(q: str, stop: str, move: str, then: str, then_move: str) -> None:
        # move over everything until `stop`, step past it into `then`
        for s in ALPHABET:
            if s == stop:
                r(q, s, then, None, then_move)
            elif s != "_":
                r(q, s, q, None, move)

    # 1. fetch: restore marks up to '$', find the head mark, carry it to the slot
    for s in ALPHABET:
        if s == "$":
            r("fetch", s, "find_head", None, "R")
        elif s != "_":
            r("fetch", s, "fetch", RESTORE.get(s), "R")
    for b in BITS:
        r("find_head", b, "find_head", None, "R")
    for m, v in UNHEAD.items():
        r("find_head", m, f"carry{v}", None, "L")
        sweep(f"carry{v}", "]", "L", f"slot{v}", "L")
        for b in BITS:
            r(f"slot{v}", b, "rewind_match", v, "L")

    # 2. match register bits against every rule
    sweep("rewind_match", "[", "L", "pick", "R")
    for s in "oi":
        r("pick", s, "pick", None, "R")
    for v in BITS:
        r("pick", v, f"to_rules{v}", MATCH[v], "R")
        for s in "01oi":
            r(f"to_rules{v}", s, f"to_rules{v}", None, "R")
        r(f"to_rules{v}", "]", f"next_rule{v}", None, "R")
        for s in ALPHABET:
            if s == ";":
                r(f"next_rule{v}", s, f"key_bit{v}", None, "R")
            elif s == "$":
                r(f"next_rule{v}", s, "rewind_match", None, "L")
            elif s != "_":
                r(f"next_rule{v}", s, f"next_rule{v}", None, "R")
        for s in "oipj":
            r(f"key_bit{v}", s, f"key_bit{v}", None, "R")
        for c in BITS:
            r(f"key_bit{v}", c, f"next_rule{v}", MATCH[c] if c == v else MISS[c], "R")
    r("pick", "]", "dead_rule", None, "R")

    # 3. find the live rule
    for s in ALPHABET:
        if s == ";":
            r("dead_rule", s, "check_rule", None, "R")
        elif s == "$":
            r("dead_rule", s, HALT_STATE, None, "S")
        elif s != "_":
            r("dead_rule", s, "dead_rule", None, "R")
    for s in "oi":
        r("check_rule", s, "check_rule", None, "R")
    for s in "pj":
        r("check_rule", s, "dead_rule", None, "R")
    r("check_rule", ">", "rewind_copy", "+", "L")

    # copy next-state bits into the register
    sweep("rewind_copy", "[", "L", "find_live", "R")
    sweep("find_live", "+", "R", "copy_bit", "R")
    for s in "oi":
        r("copy_bit", s, "copy_bit", None, "R")
    for v in BITS:
        r("copy_bit", v, f"copy_back{v}", MATCH[v], "L")
        sweep(f"copy_back{v}", "[", "L", f"put{v}", "R")
        for s in "xy":
            r(f"put{v}", s, f"put{v}", None, "R")
        for s in "oi":
            r(f"put{v}", s, "rewind_copy", COPIED[v], "L")
    r("copy_bit", "/", "write_sym", None, "R")

    # 4. write the simulated symbol, move the head mark, go home
    for b in BITS:
        r("write_sym", b, f"move{b}", None, "R")
        for m in "LRS":
            r(f"move{b}", m, f"to_tape{b}{m}", None, "R")
            sweep(f"to_tape{b}{m}", "$", "R", f"find{b}{m}", "R")
            for c in BITS:
                r(f"find{b}{m}", c, f"find{b}{m}", None, "R")
            for h in "ab":
                if m == "S":
                    r(f"find{b}{m}", h, "home", HEAD[b], "L")
                else:
                    r(f"find{b}{m}", h, "mark", b, m)
    for c, h in (("0", "a"), ("1", "b"), ("_", "a")):
        r("mark", c, "home", h, "L")
    for s in ALPHABET:
        if s == "[":
            r("home", s, "fetch", None, "R")
        elif s != "_":
            r("home", s, "home", None, "L")
    return rules


def utm_text() -> str:
    """The universal machine in ``.tm`` format (what ships as ``utm.tm``)."""
    lines = [
        "# Universal machine for two-symbol programs; generated by memtm.utm.utm_text()",
        "machine utm",
        "blank _",
        "start fetch",
        f"halt {HALT_STATE}",
        "alphabet " + " ".join(ALPHABET),
    ]
    for (q, s), (q2, w, m) in _rules().items():
        lines.append(f"{q} {s} -> {q2} {w} {m}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Encoding:
    tape: str
    codes: dict[str, str]
    mark: str
    pad: int


def _symbol_map(spec: MachineSpec) -> tuple[str, str]:
    others = sorted(spec.alphabet - {spec.blank})
    if len(others) != 1:
        raise ValueError(f"universal machine runs two-symbol programs; {spec.name!r} has {len(spec.alphabet)}")
    return spec.blank, others[0]


def encode(spec: MachineSpec, symbols: str = "", pad: int = 4) -> Encoding:
    """Universal-machine input for ``spec`` on ``symbols``.

    ``pad`` blank cells precede the simulated origin, bounding how far left
    the program may move.
    """
    blank, mark = _symbol_map(spec)
    spec.check_input(symbols)
    order = [spec.start] + sorted(spec.states - {spec.start})
    width = max(1, (len(order) - 1).bit_length())
    codes = {q: format(i, f"0{width}b") for i, q in enumerate(order)}
    bit = {blank: "0", mark: "1"}
    rules = "".join(
        f";{codes[q]}{bit[a]}>{codes[q2]}/{bit[b]}{MOVE_NAMES[d]}"
        for (q, a), (q2, b, d) in sorted(spec.rules.items())
    )
    cells = ["0"] * pad + [bit[s] for s in symbols]
    if len(cells) == pad:
        cells.append("0")
    cells[pad] = HEAD[cells[pad]]
    tape = f"[{codes[spec.start]}0]{rules}${''.join(cells)}"
    return Encoding(tape, codes, mark, pad)


@dataclass(frozen=True)
class Decoded:
    state: str
    head: int
    cells: dict[int, str]


def decode(enc: Encoding, spec: MachineSpec, tape: str) -> Decoded:
    """Read the simulated configuration off a halted universal-machine tape.

    ``tape`` starts at the universal machine's origin; trailing blanks may be
    omitted.  ``cells`` maps simulated positions to symbols, blanks included.
    """
    width = len(next(iter(enc.codes.values())))
    code = "".join(RESTORE.get(c, c) for c in tape[1 : 1 + width])
    by_code = {v: k for k, v in enc.codes.items()}
    start = tape.index("$") + 1
    blank, mark = _symbol_map(spec)
    cells: dict[int, str] = {}
    head = None
    for i, c in enumerate(tape[start:].rstrip("_")):
        pos = i - enc.pad
        if c in UNHEAD:
            head = pos
            c = UNHEAD[c]
        cells[pos] = mark if c == "1" else blank
    if head is None:
        raise ValueError("no head mark on the simulated tape")
    return Decoded(by_code[code], head, cells)
