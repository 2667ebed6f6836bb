"""Append-only, integrity-checked log of tape writes.

Each write is a :class:`HistoryEntry` ``(position, symbol, timestamp)`` sealed
with a 64-bit checksum.  Entries are kept per position in timestamp order so a
read at time ``t`` is a binary search for the last write with
``timestamp <= t``.  Positions that were never written read as the blank.
"""

from __future__ import annotations

import hashlib
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, replace

from memtm.errors import (
    IndexOutOfRange,
    IntegrityViolation,
    NonMonotonicTimestamp,
    StoreNotEmpty,
    UnknownSymbol,
)

CHECKSUM_BITS = 64


def entry_checksum(position: int, symbol: str, timestamp: int) -> int:
    """64-bit BLAKE2b digest of the three entry fields."""
    payload = f"{position}\x1f{symbol}\x1f{timestamp}".encode()
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "big")


@dataclass(frozen=True, slots=True)
class HistoryEntry:
    position: int
    symbol: str
    timestamp: int
    checksum: int

    @classmethod
    def seal(cls, position: int, symbol: str, timestamp: int) -> HistoryEntry:
        return cls(position, symbol, timestamp, entry_checksum(position, symbol, timestamp))

    def is_intact(self) -> bool:
        return entry_checksum(self.position, self.symbol, self.timestamp) == self.checksum

    def dump_line(self) -> str:
        return f"{self.position}\t{self.symbol}\t{self.timestamp}\t{self.checksum:016x}"


class HistoryStore:
    """Write log with read-latest-at-time semantics.

    Single writer; concurrent readers are fine as long as no append is in
    flight.  ``comparisons`` counts every timestamp comparison made by
    :meth:`read_latest` and exists for instrumentation only.
    """

    def __init__(self, blank: str = "_", alphabet: Iterable[str] | None = None):
        self.blank = blank
        self.alphabet = frozenset(alphabet) if alphabet is not None else None
        if self.alphabet is not None and blank not in self.alphabet:
            raise UnknownSymbol(blank)
        self._log: list[HistoryEntry] = []
        # per position: entries and the parallel timestamp index used for search
        self._entries: dict[int, list[HistoryEntry]] = {}
        self._times: dict[int, list[int]] = {}
        # insertion index -> (position, slot within that position)
        self._slots: list[tuple[int, int]] = []
        self._ids: dict[int, list[int]] = {}
        self.comparisons = 0
        self.last_read_comparisons = 0
        # insertion index of the entry the last read resolved to, None for blank
        self.last_read_index: int | None = None

    def __len__(self) -> int:
        return len(self._log)

    def __iter__(self) -> Iterator[HistoryEntry]:
        return iter(self._log)

    def __getitem__(self, index: int) -> HistoryEntry:
        return self._log[index]

    @property
    def positions(self) -> list[int]:
        return sorted(self._entries)

    def writes_at(self, position: int) -> int:
        return len(self._times.get(position, ()))

    def timestamps_at(self, position: int) -> list[int]:
        return list(self._times.get(position, ()))

    def append_write(self, position: int, symbol: str, timestamp: int) -> HistoryEntry:
        if timestamp < 0:
            raise ValueError(f"timestamp must be non-negative, got {timestamp}")
        if self.alphabet is not None and symbol not in self.alphabet:
            raise UnknownSymbol(symbol)
        times = self._times.get(position)
        if times is None:
            times = self._times[position] = []
            self._entries[position] = []
            self._ids[position] = []
        elif timestamp <= times[-1]:
            raise NonMonotonicTimestamp(position, timestamp, times[-1])
        entry = HistoryEntry.seal(position, symbol, timestamp)
        self._slots.append((position, len(times)))
        self._ids[position].append(len(self._log))
        times.append(timestamp)
        self._entries[position].append(entry)
        self._log.append(entry)
        return entry

    def read_latest(self, position: int, time: int) -> str:
        """Symbol of the last write at ``position`` with timestamp <= ``time``."""
        if time < 0:
            raise ValueError(f"time must be non-negative, got {time}")
        times = self._times.get(position)
        self.last_read_index = None
        if not times:
            self.last_read_comparisons = 0
            return self.blank
        lo, hi = 0, len(times)
        n = 0
        while lo < hi:
            mid = (lo + hi) // 2
            n += 1
            if times[mid] <= time:
                lo = mid + 1
            else:
                hi = mid
        self.last_read_comparisons = n
        self.comparisons += n
        if lo == 0:
            return self.blank
        entry = self._entries[position][lo - 1]
        index = self._ids[position][lo - 1]
        if not entry.is_intact():
            raise IntegrityViolation(entry, index)
        self.last_read_index = index
        return entry.symbol

    def seed_input(self, symbols: Sequence[str], origin: int = 0) -> None:
        """Record the initial tape as timestamp-0 writes starting at ``origin``."""
        if self._log:
            raise StoreNotEmpty(f"store already holds {len(self._log)} entries")
        if self.alphabet is not None:
            for s in symbols:
                if s not in self.alphabet:
                    raise UnknownSymbol(s)
        for i, s in enumerate(symbols):
            self.append_write(origin + i, s, 0)

    def audit(self) -> list[tuple[int, HistoryEntry]]:
        """Every ``(insertion index, entry)`` whose checksum no longer matches."""
        return [(i, e) for i, e in enumerate(self._log) if not e.is_intact()]

    def corrupt_entry(self, index: int, *, field: str = "symbol", bit: int = 0) -> HistoryEntry:
        """Fault injection: flip one bit of a stored field, leaving the checksum stale.

        ``field`` is ``"symbol"`` (bit of the code point), ``"position"`` or
        ``"timestamp"``.  The search index is untouched, as a storage fault
        would leave it.  Returns the corrupted entry.
        """
        if not 0 <= index < len(self._log):
            raise IndexOutOfRange(f"entry index {index} not in [0, {len(self._log)})")
        old = self._log[index]
        mask = 1 << bit
        if field == "symbol":
            bad = replace(old, symbol=chr(ord(old.symbol) ^ mask))
        elif field == "position":
            bad = replace(old, position=old.position ^ mask)
        elif field == "timestamp":
            bad = replace(old, timestamp=old.timestamp ^ mask)
        else:
            raise ValueError(f"unknown field {field!r}")
        position, slot = self._slots[index]
        self._log[index] = bad
        self._entries[position][slot] = bad
        return bad

    def dumps(self) -> str:
        return "".join(e.dump_line() + "\n" for e in self._log)

    @classmethod
    def from_dump(cls, text: str, blank: str = "_", alphabet: Iterable[str] | None = None) -> HistoryStore:
        """Rebuild a store from :meth:`dumps` output; every checksum is verified."""
        store = cls(blank, alphabet)
        for lineno, line in enumerate(text.splitlines(), 1):
            pos, sym, ts, digest = line.split("\t")
            entry = store.append_write(int(pos), sym, int(ts))
            if entry.checksum != int(digest, 16):
                raise IntegrityViolation(entry, lineno - 1)
        return store
