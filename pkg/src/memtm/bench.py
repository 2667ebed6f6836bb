"""Instrumented kernel runs for the logarithmic-overhead claims.

The primary metric is the number of timestamp comparisons a history read
costs.  Wall time is recorded per sample but is only advisory.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import statistics
import time
from collections.abc import Sequence
from dataclasses import dataclass, field

from memtm.errors import InsufficientSamples, UndefinedTransition
from memtm.history import CHECKSUM_BITS
from memtm.kernel import KernelState
from memtm.machine import MachineSpec, Signal

CSV_HEADER = ("t", "comparisons", "entries", "step_bits", "position_bits", "wall_time_ns")

# checksum, a sign bit for the position, and one bit so timestamp 0 has a width
ENTRY_FRAMING_BITS = CHECKSUM_BITS + 2


def read_bound(k: int) -> int:
    """Most comparisons a read may make over ``k`` writes: ceil(log2 k) + 1, 0 if k == 0."""
    return 0 if k == 0 else (k - 1).bit_length() + 1


def entry_bits(position: int, timestamp: int, symbol_bits: int) -> int:
    """Bits needed to store one entry with variable-width integer fields."""
    return CHECKSUM_BITS + symbol_bits + max(1, timestamp.bit_length()) + 1 + abs(position).bit_length()


def entry_bits_budget(position: int, t: int, symbol_bits: int) -> int:
    """c + symbol_bits + ceil(log2(t+1)) + ceil(log2(|p|+2))."""
    return ENTRY_FRAMING_BITS + symbol_bits + t.bit_length() + (abs(position) + 1).bit_length()


@dataclass(frozen=True, slots=True)
class Sample:
    t: int
    comparisons: int
    entries: int
    step_bits: int
    position_bits: int
    wall_time_ns: int

    def row(self) -> tuple[int, ...]:
        return (self.t, self.comparisons, self.entries, self.step_bits, self.position_bits, self.wall_time_ns)


@dataclass
class OverheadReport:
    machine: str
    input_length: int
    samples: list[Sample] = field(default_factory=list)
    steps: int = 0
    halted: bool = False
    reads: int = 0
    total_comparisons: int = 0
    # reads whose comparison count exceeded read_bound(k)
    bound_violations: list[tuple[int, int, int, int]] = field(default_factory=list)
    max_bound_ratio: float = 0.0
    # entries whose storable size exceeded entry_bits_budget
    space_violations: list[tuple[int, int, int]] = field(default_factory=list)
    max_entry_bits: int = 0
    trace_digest: str = ""
    # octave j -> [comparisons, reads] for reads at steps in (2**(j-1), 2**j]
    octaves: dict[int, list[int]] = field(default_factory=dict)

    @property
    def mean_comparisons(self) -> float:
        return self.total_comparisons / self.reads if self.reads else 0.0

    def mean_comparisons_near(self, t: int) -> float:
        """Mean comparisons per read over the octave ending at ``t`` (a power of two)."""
        comps, reads = self.octaves[(t - 1).bit_length() if t > 0 else 0]
        return comps / reads

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for s in self.samples:
            w.writerow(s.row())
        return buf.getvalue()


def _is_sample_step(t: int) -> bool:
    return t > 0 and t & (t - 1) == 0


def run_instrumented(
    spec: MachineSpec, symbols: Sequence[str], max_steps: int, *, timing: bool = True
) -> OverheadReport:
    """Run the kernel for up to ``max_steps`` steps, sampling at powers of two.

    Unlike :func:`~memtm.kernel.run_kernel`, hitting the step limit is the
    normal way a benchmark ends, so it is reported through ``halted`` rather
    than raised.  The full trace is not retained; ``trace_digest`` is the
    SHA-256 of the trace text so callers can check the run was not perturbed.
    With ``timing=False`` the wall-time column is zero, making output reproducible.
    """
    if max_steps < 1:
        raise ValueError(f"max_steps must be positive, got {max_steps}")
    state = KernelState.init(spec, symbols)
    history = state.history
    sym_bits = spec.symbol_bits
    report = OverheadReport(spec.name, len(symbols))
    digest = hashlib.sha256()
    max_abs_p = max([abs(p) for p in history.positions] + [0])

    def account_read(t: int, p: int) -> None:
        n = history.last_read_comparisons
        k = history.writes_at(p)
        report.reads += 1
        report.total_comparisons += n
        bucket = report.octaves.setdefault((t - 1).bit_length() if t > 0 else 0, [0, 0])
        bucket[0] += n
        bucket[1] += 1
        bound = read_bound(k)
        if n > bound:
            report.bound_violations.append((t, p, k, n))
        if bound:
            report.max_bound_ratio = max(report.max_bound_ratio, n / bound)

    # the initial configuration's read happened inside init; replay it for the counters
    history.read_latest(0, 0)
    account_read(0, 0)

    while True:
        rec = state.record()
        digest.update((rec.line() + "\n").encode())
        t = rec.config.step
        if rec.halted:
            report.halted = True
            break
        if t >= max_steps:
            break
        t0 = time.perf_counter_ns()
        out = state.step()
        elapsed = time.perf_counter_ns() - t0
        if out is Signal.UNDEFINED:
            raise UndefinedTransition(rec.config)
        t += 1
        head = state.config.head
        account_read(t, head)

        written = history[-1]
        bits = entry_bits(written.position, written.timestamp, sym_bits)
        report.max_entry_bits = max(report.max_entry_bits, bits)
        if bits > entry_bits_budget(written.position, t, sym_bits):
            report.space_violations.append((t, written.position, bits))
        max_abs_p = max(max_abs_p, abs(written.position), abs(head))

        if _is_sample_step(t):
            report.samples.append(
                Sample(
                    t=t,
                    comparisons=history.last_read_comparisons,
                    entries=len(history),
                    step_bits=t.bit_length(),
                    position_bits=(max_abs_p + 1).bit_length(),
                    wall_time_ns=elapsed if timing else 0,
                )
            )
    report.steps = state.config.step
    report.trace_digest = digest.hexdigest()
    return report


@dataclass(frozen=True)
class ScalingVerdict:
    log_slope: float
    log_rss: float
    linear_slope: float
    linear_rss: float
    linear_threshold: float
    logarithmic_consistent: bool

    def text(self) -> str:
        label = "logarithmic-consistent" if self.logarithmic_consistent else "not logarithmic-consistent"
        return (
            f"{label}: slope vs log2(t) = {self.log_slope:.4f} (rss {self.log_rss:.4g}), "
            f"slope vs t = {self.linear_slope:.6g} (rss {self.linear_rss:.4g}, threshold {self.linear_threshold:g})"
        )


def _fit(xs: list[float], ys: list[float]) -> tuple[float, float]:
    slope, intercept = statistics.linear_regression(xs, ys)
    rss = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    return slope, rss


def fit_scaling(
    report: OverheadReport | Sequence[tuple[int, float]],
    *,
    linear_threshold: float = 1e-3,
    min_samples: int = 16,
    min_octaves: int = 3,
) -> ScalingVerdict:
    """Least-squares fits of comparisons against log2(t) and against t.

    Logarithmic-consistent means the log fit leaves less residual than the
    linear one and the linear slope stays under ``linear_threshold``
    comparisons per step.  Accepts a report or plain ``(t, comparisons)`` pairs.
    """
    if isinstance(report, OverheadReport):
        points = [(s.t, float(s.comparisons)) for s in report.samples]
    else:
        points = [(int(t), float(c)) for t, c in report]
    points = [(t, c) for t, c in points if t > 0]
    if len(points) < min_samples:
        raise InsufficientSamples(f"{len(points)} samples, need {min_samples}")
    ts = [t for t, _ in points]
    octaves = math.log2(max(ts) / min(ts))
    if octaves < min_octaves:
        raise InsufficientSamples(f"samples span {octaves:.1f} octaves, need {min_octaves}")
    ys = [c for _, c in points]
    log_slope, log_rss = _fit([math.log2(t) for t in ts], ys)
    lin_slope, lin_rss = _fit([float(t) for t in ts], ys)
    ok = log_rss < lin_rss and lin_slope < linear_threshold
    return ScalingVerdict(log_slope, log_rss, lin_slope, lin_rss, linear_threshold, ok)
