from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from memtm.bench import read_bound
from memtm.errors import (
    IndexOutOfRange,
    IntegrityViolation,
    NonMonotonicTimestamp,
    StoreNotEmpty,
    UnknownSymbol,
)
from memtm.history import HistoryEntry, HistoryStore, entry_checksum

ALPHABET = "_01x"


def linear_scan(entries, position, time, blank="_"):
    """Independent oracle: maximum timestamp <= time over the whole log."""
    best = None
    for e in entries:
        if e[0] == position and e[2] <= time and (best is None or e[2] > best[2]):
            best = e
    return blank if best is None else best[1]


def random_writes(rng, n, positions=range(-20, 21), max_gap=5):
    last: dict[int, int] = {}
    writes = []
    for _ in range(n):
        p = rng.choice(positions)
        t = last.get(p, -1) + rng.randint(1, max_gap)
        last[p] = t
        writes.append((p, rng.choice(ALPHABET), t))
    return writes


def test_append_to_empty_store():
    s = HistoryStore("_", ALPHABET)
    s.append_write(0, "1", 1)
    assert len(s) == 1
    assert s.writes_at(0) == 1


def test_equal_timestamp_rejected():
    s = HistoryStore("_", ALPHABET)
    s.append_write(0, "0", 3)
    with pytest.raises(NonMonotonicTimestamp):
        s.append_write(0, "x", 3)
    assert len(s) == 1


def test_older_timestamp_rejected_but_other_positions_free():
    s = HistoryStore("_", ALPHABET)
    s.append_write(0, "0", 3)
    with pytest.raises(NonMonotonicTimestamp):
        s.append_write(0, "1", 2)
    s.append_write(1, "1", 2)


def test_unknown_symbol():
    s = HistoryStore("_", ALPHABET)
    with pytest.raises(UnknownSymbol):
        s.append_write(0, "z", 1)


def test_ten_thousand_random_appends():
    rng = random.Random(7)
    writes = random_writes(rng, 10_000)
    s = HistoryStore("_", ALPHABET)
    for w in writes:
        s.append_write(*w)
    assert len(s) == len(writes) == 10_000
    assert s.audit() == []


def test_read_empty_store_is_blank():
    assert HistoryStore("_").read_latest(5, 10) == "_"


def test_read_latest_picks_max_timestamp_at_or_before():
    s = HistoryStore("_", ALPHABET)
    s.append_write(0, "1", 1)
    s.append_write(0, "0", 3)
    assert s.read_latest(0, 0) == "_"
    assert s.read_latest(0, 2) == "1"
    assert s.read_latest(0, 3) == "0"
    assert s.read_latest(0, 100) == "0"


def test_random_reads_match_linear_scan():
    rng = random.Random(11)
    writes = random_writes(rng, 1_000)
    s = HistoryStore("_", ALPHABET)
    for w in writes:
        s.append_write(*w)
    horizon = max(t for _, _, t in writes) + 2
    for _ in range(1_000):
        p, t = rng.randint(-22, 22), rng.randint(0, horizon)
        assert s.read_latest(p, t) == linear_scan(writes, p, t)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.tuples(st.integers(-5, 5), st.sampled_from(ALPHABET), st.integers(1, 4)), max_size=60),
    st.lists(st.tuples(st.integers(-6, 6), st.integers(0, 250)), min_size=1, max_size=30),
)
def test_read_latest_equals_linear_scan(raw, queries):
    last: dict[int, int] = {}
    writes = []
    for p, sym, gap in raw:
        last[p] = last.get(p, -1) + gap
        writes.append((p, sym, last[p]))
    s = HistoryStore("_", ALPHABET)
    for w in writes:
        s.append_write(*w)
    for p, t in queries:
        assert s.read_latest(p, t) == linear_scan(writes, p, t)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3000), st.integers(0, 4000))
def test_read_comparison_bound(k, t):
    s = HistoryStore("_")
    for i in range(k):
        s.append_write(0, "1", i + 1)
    s.read_latest(0, t)
    assert s.last_read_comparisons <= read_bound(k)
    # (k - 1).bit_length() == ceil(log2 k)
    assert read_bound(k) == (0 if k == 1 else (k - 1).bit_length()) + 1


def test_reads_do_not_change_serialization():
    rng = random.Random(3)
    s = HistoryStore("_", ALPHABET)
    for w in random_writes(rng, 500):
        s.append_write(*w)
    before = s.dumps()
    for _ in range(500):
        s.read_latest(rng.randint(-20, 20), rng.randint(0, 2000))
    assert s.dumps() == before


def test_timestamps_strictly_increase_per_position():
    rng = random.Random(5)
    s = HistoryStore("_", ALPHABET)
    for w in random_writes(rng, 2_000):
        s.append_write(*w)
    for p in s.positions:
        ts = s.timestamps_at(p)
        assert all(a < b for a, b in zip(ts, ts[1:]))


def test_seed_input():
    s = HistoryStore("_", "_01")
    s.seed_input("101", 0)
    assert s.read_latest(1, 0) == "0"
    assert [e.timestamp for e in s] == [0, 0, 0]


def test_seed_empty():
    s = HistoryStore("_")
    s.seed_input("", 0)
    assert len(s) == 0
    assert s.read_latest(0, 0) == "_"


def test_seed_offset_origin():
    s = HistoryStore("_", "_1")
    s.seed_input("11", -1)
    assert s.read_latest(-1, 0) == "1"
    assert s.read_latest(0, 0) == "1"
    assert s.read_latest(1, 0) == "_"


def test_seed_records_blank_inputs_explicitly():
    s = HistoryStore("_", "_1")
    s.seed_input("1_1", 0)
    assert len(s) == 3
    assert s[1].symbol == "_"


def test_seed_nonempty_store():
    s = HistoryStore("_")
    s.append_write(0, "1", 1)
    with pytest.raises(StoreNotEmpty):
        s.seed_input("1", 0)


def test_corrupt_then_read_raises():
    s = HistoryStore("_", "_01")
    s.seed_input("101", 0)
    s.corrupt_entry(1)
    with pytest.raises(IntegrityViolation) as info:
        s.read_latest(1, 0)
    assert info.value.index == 1


def test_corrupt_unread_entry_is_lazy():
    s = HistoryStore("_", "_01")
    s.append_write(0, "1", 1)
    s.append_write(0, "0", 5)
    s.corrupt_entry(0)
    # reads at t >= 5 select the intact entry
    assert s.read_latest(0, 7) == "0"
    assert s.read_latest(3, 7) == "_"
    with pytest.raises(IntegrityViolation):
        s.read_latest(0, 2)


def test_corrupt_then_audit_reports_one():
    rng = random.Random(9)
    s = HistoryStore("_", ALPHABET)
    for w in random_writes(rng, 300):
        s.append_write(*w)
    s.corrupt_entry(123)
    bad = s.audit()
    assert [i for i, _ in bad] == [123]


def test_corrupt_out_of_range():
    s = HistoryStore("_")
    with pytest.raises(IndexOutOfRange):
        s.corrupt_entry(0)


@settings(max_examples=200, deadline=None)
@given(
    st.integers(-(2**20), 2**20),
    st.sampled_from(ALPHABET),
    st.integers(0, 2**30),
    st.sampled_from(["symbol", "position", "timestamp"]),
    st.integers(0, 31),
)
def test_single_bit_mutation_detected(p, sym, t, field, bit):
    if field == "symbol" and bit > 15:
        bit %= 16
    s = HistoryStore("_")
    s.append_write(p, sym, t)
    s.corrupt_entry(0, field=field, bit=bit)
    with pytest.raises(IntegrityViolation):
        s.read_latest(p, t)


def test_checksum_is_64_bit_and_field_sensitive():
    c = entry_checksum(3, "1", 7)
    assert 0 <= c < 2**64
    assert c != entry_checksum(3, "1", 8)
    assert c != entry_checksum(-3, "1", 7)
    assert HistoryEntry.seal(3, "1", 7).is_intact()


def test_dump_format_and_roundtrip():
    s = HistoryStore("_", "_01")
    s.seed_input("10", -1)
    s.append_write(0, "1", 4)
    text = s.dumps()
    lines = text.splitlines()
    assert text.endswith("\n")
    assert lines[0].split("\t")[:3] == ["-1", "1", "0"]
    assert lines[2].split("\t")[:3] == ["0", "1", "4"]
    assert all(len(line.split("\t")[3]) == 16 for line in lines)
    assert HistoryStore.from_dump(text, "_", "_01").dumps() == text


def test_from_dump_detects_tampering():
    s = HistoryStore("_", "_01")
    s.seed_input("10", 0)
    text = s.dumps().replace("0\t1\t0\t", "0\t0\t0\t", 1)
    with pytest.raises(IntegrityViolation):
        HistoryStore.from_dump(text)
