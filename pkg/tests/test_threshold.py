from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from memtm import corpus
from memtm.errors import ProgramExhausted
from memtm.machine import run_direct
from memtm.threshold import (
    Counter,
    Sequencer,
    counter_increment,
    run_sequenced,
    sequencer_tick,
    threshold_unit,
)


@pytest.mark.parametrize("x, bit", [(5, 1), (0, 0), (-3, 0), (1, 1), (-1, 0)])
def test_threshold_unit(x, bit):
    assert threshold_unit(x) == bit


@given(st.integers())
def test_threshold_unit_definition(x):
    assert threshold_unit(x) == int(x > 0)


@given(st.lists(st.integers(-100, 100), max_size=50), st.integers(-100, 100))
def test_threshold_unit_ignores_call_history(history, x):
    expected = threshold_unit(x)
    for h in history:
        threshold_unit(h)
    assert threshold_unit(x) == expected


def test_memoryless_composition_depends_only_on_input():
    # any composition of the unit with no stored state: outputs under permuted
    # call orders must agree pointwise
    compose = lambda x: threshold_unit(threshold_unit(x) - threshold_unit(-x))  # noqa: E731
    xs = list(range(-50, 51))
    first = {x: compose(x) for x in xs}
    rng = random.Random(0)
    for _ in range(20):
        rng.shuffle(xs)
        assert {x: compose(x) for x in xs} == first


def test_counter_three_increments():
    c = Counter()
    for _ in range(3):
        c = counter_increment(c)
    assert c.total == 3


def test_counter_reads_are_pure():
    c = Counter()
    for i in range(100):
        c = counter_increment(c)
        assert c.total == i + 1
        assert c.total == i + 1


def test_sequencer_emits_in_order():
    s = Sequencer.of("abc")
    out = []
    for _ in range(3):
        a, s = sequencer_tick(s)
        out.append(a)
    assert out == ["a", "b", "c"]
    with pytest.raises(ProgramExhausted):
        sequencer_tick(s)


def test_sequencer_empty_program():
    with pytest.raises(ProgramExhausted):
        sequencer_tick(Sequencer.of([]))


def test_sequencer_random_program():
    rng = random.Random(42)
    program = [rng.randrange(1000) for _ in range(100)]
    s = Sequencer.of(program)
    out = []
    for _ in program:
        a, s = sequencer_tick(s)
        out.append(a)
    assert out == program


@given(st.lists(st.integers(), max_size=30), st.integers(0, 30))
def test_sequencer_prefix(program, ticks):
    s = Sequencer.of(program)
    out = []
    for _ in range(min(ticks, len(program))):
        a, s = sequencer_tick(s)
        out.append(a)
    assert out == program[: len(out)]
    assert s.counter.total == len(out)


def test_sequenced_kernel_reproduces_direct_trace():
    spec = corpus.machine("bb3")
    assert run_sequenced(spec, "", 100) == run_direct(spec, "", 100)


def test_sequenced_kernel_stops_when_program_runs_out():
    trace = run_sequenced(corpus.machine("revisit"), "", 10)
    assert [r.config.step for r in trace] == list(range(11))
