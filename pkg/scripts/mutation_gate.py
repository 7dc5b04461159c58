"""Run every planted mutant against every suite and tabulate which suites catch it.

Usage: python3 scripts/mutation_gate.py [--trials N] [--programs N] [--frames N] [--seed S] [--json]
"""

import argparse
import sys

from gilkit.harness.mutation import GateConfig, mutation_gate


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    d = GateConfig()
    ap.add_argument("--trials", type=int, default=d.trials)
    ap.add_argument("--programs", type=int, default=d.programs)
    ap.add_argument("--frames", type=int, default=d.frames)
    ap.add_argument("--seed", type=int, default=d.seed)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    rep = mutation_gate(GateConfig(args.trials, args.programs, args.frames, args.seed))
    if args.json:
        print(rep.dumps())
    else:
        width = max(map(len, rep.notes))
        for name, suites in rep.notes.items():
            print(f"{name:<{width}}  {', '.join(suites) if suites else 'NOT DETECTED'}")
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
