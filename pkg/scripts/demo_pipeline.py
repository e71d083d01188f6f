#!/usr/bin/env python3
"""Run the end-to-end experiment once and print the human summary.

Small default knobs so the demo finishes in seconds; pass --full for the
acceptance-scale configuration (larger universe, 200 sampled permutations).
"""

import argparse
import sys

from omegalab.config import ExperimentConfig
from omegalab.diag import run_pipeline
from omegalab.jsonio import canonical_dumps, write_json


def parse_args():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--builds", type=int, default=2)
    parser.add_argument("--universe", type=int, default=4096)
    parser.add_argument("--samples", type=int, default=20)
    parser.add_argument("--full", action="store_true",
                        help="acceptance-scale run (takes a few seconds)")
    parser.add_argument("--out", help="write the JSON report here")
    return parser.parse_args()


def make_config(args) -> ExperimentConfig:
    if args.full:
        return ExperimentConfig(
            builds=4, universe=1 << 20, rows=16, cols=16, value_bound=4,
            threshold=4, depth=4, probes=4, probe_bound=16,
            search_bound=1 << 20, samples=200, seed=args.seed)
    return ExperimentConfig(
        builds=args.builds, universe=args.universe, rows=8, cols=8,
        value_bound=2, threshold=2, depth=2, probes=2, probe_bound=4,
        search_bound=args.universe, samples=args.samples, seed=args.seed)


def main() -> int:
    args = parse_args()
    config = make_config(args)
    report = run_pipeline(config)

    for b in report.builds:
        state = ("degraded: " + b.run.failure_kind) if b.run.degraded else "ok"
        print(f"build {b.index}: A = {list(b.run.condition.elements)} ({state})")
    indep = report.independence
    print(f"joint independence: {'PASS' if indep.ok else 'FAIL'} "
          f"(min combination size {indep.size_found}, t={indep.threshold})")
    dens = report.density
    print(f"combination density: {'PASS' if dens.ok else 'FAIL'}")
    s = report.sampling
    print(f"capture sampling: {s.samples} permutations, "
          f"{s.up_checked + s.down_checked} cases checked, "
          f"{s.violations} violations")
    print(f"overall: {'ok' if report.ok else 'degraded or failing'}")

    if args.out:
        write_json(args.out, report.to_json_obj())
        print(f"wrote {args.out}")
    else:
        sys.stderr.write(canonical_dumps(report.sampling.to_json_obj()))
    return 0 if report.sampling.violations == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
