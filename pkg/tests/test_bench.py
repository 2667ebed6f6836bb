from __future__ import annotations

import csv
import hashlib
import io
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from memtm import corpus
from memtm.bench import (
    CSV_HEADER,
    ENTRY_FRAMING_BITS,
    entry_bits,
    entry_bits_budget,
    fit_scaling,
    read_bound,
    run_instrumented,
)
from memtm.errors import InsufficientSamples, StepLimitExceeded
from memtm.kernel import run_kernel
from memtm.machine import format_trace


@pytest.fixture(scope="module")
def revisit_64k():
    return run_instrumented(corpus.machine("revisit"), "", 2**16)


def _kernel_trace_text(spec, symbols, n):
    try:
        trace = run_kernel(spec, symbols, n)
    except StepLimitExceeded as exc:
        trace = exc.trace
    return format_trace(trace)


@pytest.mark.parametrize("name, symbols", [("bb3", ""), ("successor", "1011"), ("revisit", ""), ("palindrome", "0110")])
def test_instrumentation_does_not_perturb(name, symbols):
    spec = corpus.machine(name)
    report = run_instrumented(spec, symbols, 3000)
    assert report.trace_digest == hashlib.sha256(_kernel_trace_text(spec, symbols, 3000).encode()).hexdigest()


def test_entries_column(revisit_64k):
    for s in revisit_64k.samples:
        assert s.entries == revisit_64k.input_length + s.t


def test_entries_column_with_input():
    report = run_instrumented(corpus.machine("successor"), "10011", 100)
    assert report.samples
    for s in report.samples:
        assert s.entries == 5 + s.t


def test_step_bits_nondecreasing(revisit_64k):
    bits = [s.step_bits for s in revisit_64k.samples]
    assert bits == sorted(bits)
    assert all(s.step_bits == math.ceil(math.log2(s.t + 1)) for s in revisit_64k.samples)


def test_comparisons_bounded_at_2_16(revisit_64k):
    assert revisit_64k.steps == 2**16
    assert not revisit_64k.bound_violations
    assert max(s.comparisons for s in revisit_64k.samples) <= 17


def test_mean_comparisons_grow_logarithmically(revisit_64k):
    small = run_instrumented(corpus.machine("revisit"), "", 2**8)
    ratio = revisit_64k.mean_comparisons_near(2**16) / small.mean_comparisons_near(2**8)
    assert ratio <= 2.5


def test_space_accounting(revisit_64k):
    assert not revisit_64k.space_violations
    assert revisit_64k.max_entry_bits <= ENTRY_FRAMING_BITS + 1 + 17 + 2


@given(st.integers(-(2**40), 2**40), st.integers(0, 2**40), st.integers(1, 8))
def test_entry_bits_within_budget(p, t, sym_bits):
    assert entry_bits(p, t, sym_bits) <= entry_bits_budget(p, t, sym_bits)
    assert entry_bits_budget(p, t, sym_bits) == (
        ENTRY_FRAMING_BITS + sym_bits + math.ceil(math.log2(t + 1)) + math.ceil(math.log2(abs(p) + 2))
    )


@given(st.integers(1, 2**20))
def test_read_bound_formula(k):
    assert read_bound(k) == math.ceil(math.log2(k)) + 1


def test_csv_format(revisit_64k):
    text = revisit_64k.to_csv()
    assert text.endswith("\n")
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == 1 + 17
    assert all(cell.isdigit() for row in rows[1:] for cell in row)


def test_fit_exact_log_series():
    series = [(2**j, math.ceil(math.log2(2**j))) for j in range(20)]
    assert fit_scaling(series).logarithmic_consistent


def test_fit_log_series_on_dense_grid():
    series = [(t, math.ceil(math.log2(t))) for t in range(1, 5000, 37)]
    assert fit_scaling(series).logarithmic_consistent


def test_fit_linear_series():
    series = [(2**j, 2**j) for j in range(20)]
    assert not fit_scaling(series).logarithmic_consistent


def test_fit_insufficient_samples():
    with pytest.raises(InsufficientSamples):
        fit_scaling([(2**j, j) for j in range(10)])
    with pytest.raises(InsufficientSamples):
        fit_scaling([(t, 1) for t in range(100, 120)])  # < 3 octaves


def test_fit_on_short_run_is_insufficient():
    with pytest.raises(InsufficientSamples):
        fit_scaling(run_instrumented(corpus.machine("revisit"), "", 8))


def test_fit_real_run(revisit_64k):
    verdict = fit_scaling(revisit_64k)
    assert verdict.logarithmic_consistent
    assert "log2(t)" in verdict.text() and "vs t" in verdict.text()


def test_halting_machine_reports_halt():
    report = run_instrumented(corpus.machine("bb3"), "", 1000)
    assert report.halted and report.steps == 21
