"""Command-line entry point: ``memtm run|verify|bench|demo-counter``.

Exit codes: 0 halt/pass, 1 error or failed check, 2 step limit reached,
3 too few samples to fit.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from memtm import corpus
from memtm.bench import fit_scaling, run_instrumented
from memtm.errors import InsufficientSamples, MemtmError, StepLimitExceeded
from memtm.kernel import KernelState, visited_span
from memtm.machine import DirectRun, MachineSpec, drive
from memtm.threshold import Counter, Sequencer, counter_increment, run_sequenced, sequencer_tick, threshold_unit
from memtm.verify import Fault, check_coherence, check_consistency

EXIT_OK, EXIT_ERROR, EXIT_STEP_LIMIT, EXIT_SAMPLES = 0, 1, 2, 3
SUBSTRATES = ("direct", "kernel")


@dataclass(frozen=True)
class RunConfig:
    machine_path: str
    input: str = ""
    max_steps: int = 1_000_000
    substrate: str = "kernel"
    trace_out: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError(f"--max-steps must be at least 1, got {self.max_steps}")
        if self.substrate not in SUBSTRATES:
            raise ValueError(f"--substrate must be one of {SUBSTRATES}, got {self.substrate!r}")


def _tape_text(spec: MachineSpec, lo: int, hi: int, cells: str) -> str:
    # trim blank margins so both substrates print the same line
    start, end = 0, len(cells)
    while start < end and cells[start] == spec.blank:
        start += 1
    while end > start and cells[end - 1] == spec.blank:
        end -= 1
    if start == end:
        return "tape\t0\t-1\t"
    return f"tape\t{lo + start}\t{lo + end - 1}\t{cells[start:end]}"


def cmd_run(cfg: RunConfig, out=sys.stdout) -> int:
    spec = corpus.resolve(cfg.machine_path)
    symbols = cfg.input
    if cfg.substrate == "kernel":
        run = KernelState.init(spec, symbols)
    else:
        run = DirectRun(spec, symbols)
    trace_file = open(cfg.trace_out, "w", encoding="utf-8", newline="\n") if cfg.trace_out else None
    status = EXIT_OK
    last = None
    try:
        for rec in drive(run, cfg.max_steps):
            last = rec
            if trace_file:
                trace_file.write(rec.line() + "\n")
    except StepLimitExceeded:
        status = EXIT_STEP_LIMIT
    finally:
        if trace_file:
            trace_file.close()

    if isinstance(run, KernelState):
        lo, hi = visited_span(run)
        cells = "".join(run.history.read_latest(p, run.config.step) for p in range(lo, hi + 1))
    else:
        lo = min([*run.tape, run.head])
        hi = max([*run.tape, run.head])
        cells = run.tape_string(lo, hi)
    c = last.config
    outcome = "halted" if status == EXIT_OK else "step-limit"
    print(f"{outcome}\tstep={c.step}\tstate={c.state}\thead={c.head}\tsymbol={c.under_head}", file=out)
    print(_tape_text(spec, lo, hi, cells), file=out)
    return status


def _verify_one(machine: str, symbols: str, max_steps: int, probes: int, seed: int, fault: Fault | None) -> tuple[int, list[str]]:
    spec = corpus.resolve(machine)
    try:
        coherence = check_coherence(spec, symbols, max_steps, fault=fault)
        consistency = check_consistency(spec, symbols, max_steps, probes, seed=seed, fault=fault)
    except MemtmError as exc:
        side = getattr(exc, "side", "?")
        return EXIT_ERROR, [f"FAIL\t{spec.name}\t{symbols}\t{type(exc).__name__} ({side}): {exc}"]
    lines = [coherence.line(), consistency.line()]
    return (EXIT_OK if coherence.passed and consistency.passed else EXIT_ERROR), lines


def cmd_verify(
    machine: str | None,
    symbols: str,
    max_steps: int,
    probes: int,
    seed: int,
    *,
    inject_fault: int | None = None,
    all_corpus: bool = False,
    jobs: int = 1,
    out=sys.stdout,
) -> int:
    if max_steps < 1 or probes < 1:
        raise ValueError("--max-steps and --probes must be at least 1")
    fault = Fault(inject_fault) if inject_fault is not None else None
    if all_corpus:
        jobs_list = [(name, s) for name, ins in sorted(corpus.inputs().items()) for s in ins]
    else:
        if machine is None:
            raise ValueError("--machine is required unless --corpus is given")
        jobs_list = [(machine, symbols)]
    args = [(m, s, max_steps, probes, seed, fault) for m, s in jobs_list]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_verify_one, *zip(*args)))
    else:
        results = [_verify_one(*a) for a in args]
    status = EXIT_OK
    for code, lines in results:
        for line in lines:
            print(line, file=out)
        status = max(status, code)
    return status


def cmd_bench(
    machine: str, symbols: str, max_steps: int, csv_out: str | None, out=sys.stdout, *, timing: bool = True
) -> int:
    if max_steps < 1:
        raise ValueError("--max-steps must be at least 1")
    spec = corpus.resolve(machine)
    report = run_instrumented(spec, symbols, max_steps, timing=timing)
    csv_text = report.to_csv()
    if csv_out:
        Path(csv_out).write_text(csv_text, encoding="utf-8")
    else:
        out.write(csv_text)
    print(
        f"steps={report.steps} halted={int(report.halted)} reads={report.reads} "
        f"mean_comparisons={report.mean_comparisons:.3f} bound_violations={len(report.bound_violations)} "
        f"space_violations={len(report.space_violations)}",
        file=out,
    )
    try:
        verdict = fit_scaling(report)
    except InsufficientSamples as exc:
        print(f"InsufficientSamples: {exc}", file=out)
        return EXIT_SAMPLES
    print(verdict.text(), file=out)
    ok = verdict.logarithmic_consistent and not report.bound_violations and not report.space_violations
    return EXIT_OK if ok else EXIT_ERROR


def cmd_demo_counter(ticks: int = 10, out=sys.stdout) -> int:
    print("threshold_unit: " + " ".join(f"{x}->{threshold_unit(x)}" for x in (-3, 0, 5)), file=out)
    c = Counter()
    for k in range(1, ticks + 1):
        c = counter_increment(c)
        print(f"counter\tincrements={k}\ttotal={c.total}", file=out)
    seq = Sequencer.of("abc")
    emitted = []
    while seq.counter.total < len(seq.program):
        action, seq = sequencer_tick(seq)
        emitted.append(action)
    print("sequencer\t" + " ".join(map(str, emitted)), file=out)
    trace = run_sequenced(corpus.machine("bb3"), "", 100)
    last = trace[-1]
    print(f"sequenced bb3\tticks={len(trace) - 1}\t{last.line()}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="memtm", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a machine on the direct or kernel substrate")
    run.add_argument("--machine", required=True, help=".tm file or corpus machine name")
    run.add_argument("--input", default="")
    run.add_argument("--max-steps", type=int, default=1_000_000)
    run.add_argument("--substrate", choices=SUBSTRATES, default="kernel")
    run.add_argument("--trace-out")
    run.add_argument("--seed", type=int, default=0)

    ver = sub.add_parser("verify", help="lockstep kernel/oracle checks")
    ver.add_argument("--machine")
    ver.add_argument("--corpus", action="store_true", help="every corpus machine and shipped input")
    ver.add_argument("--input", default="")
    ver.add_argument("--max-steps", type=int, default=10_000)
    ver.add_argument("--probes", type=int, default=64)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--inject-fault", type=int, metavar="N", help="corrupt history entry N once it exists")
    ver.add_argument("--jobs", type=int, default=1)

    bench = sub.add_parser("bench", help="instrumented kernel run and scaling fit")
    bench.add_argument("--machine", required=True)
    bench.add_argument("--input", default="")
    bench.add_argument("--max-steps", type=int, default=1_000_000)
    bench.add_argument("--csv-out")
    bench.add_argument("--no-timing", action="store_true", help="write 0 for wall time so output is reproducible")

    demo = sub.add_parser("demo-counter", help="threshold unit, counter and sequencer demo")
    demo.add_argument("--ticks", type=int, default=10)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = RunConfig(args.machine, args.input, args.max_steps, args.substrate, args.trace_out, args.seed)
            return cmd_run(cfg)
        if args.command == "verify":
            return cmd_verify(
                args.machine,
                args.input,
                args.max_steps,
                args.probes,
                args.seed,
                inject_fault=args.inject_fault,
                all_corpus=args.corpus,
                jobs=args.jobs,
            )
        if args.command == "bench":
            return cmd_bench(args.machine, args.input, args.max_steps, args.csv_out, timing=not args.no_timing)
        return cmd_demo_counter(args.ticks)
    except (MemtmError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
