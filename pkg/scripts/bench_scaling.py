"""Comparisons-per-read scaling sweep on the revisiting machine.

Runs the instrumented kernel at several horizons and prints the per-octave mean
comparisons, the worst bound ratio and the scaling verdict for each.
"""

from __future__ import annotations

import argparse

from memtm import corpus
from memtm.bench import fit_scaling, run_instrumented
from memtm.errors import InsufficientSamples


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--machine", default="revisit")
    ap.add_argument("--input", default="")
    ap.add_argument("--max-exponent", type=int, default=20)
    args = ap.parse_args()
    spec = corpus.resolve(args.machine)
    print("t\tmean_near_t\tmax_bound_ratio\tbound_violations\tverdict")
    for e in range(8, args.max_exponent + 1, 2):
        t = 2**e
        report = run_instrumented(spec, args.input, t, timing=False)
        try:
            verdict = "logarithmic" if fit_scaling(report).logarithmic_consistent else "not logarithmic"
        except InsufficientSamples:
            verdict = "too few samples"
        print(
            f"{t}\t{report.mean_comparisons_near(report.steps):.3f}\t{report.max_bound_ratio:.3f}\t"
            f"{len(report.bound_violations)}\t{verdict}"
        )


if __name__ == "__main__":
    main()
