"""Run the model suites and the differential tester over a range of seeds.

Reports pass/fail and wall-clock time per seed; useful for finding solver
queries that are slow or undecided on inputs the fixed-seed tests never see.

Usage: python3 scripts/seed_sweep.py [--seeds 10] [--trials 100] [--programs 50]
"""

import argparse
import sys
import time

from gilkit import solver
from gilkit.harness.asrtprops import check_asrt_props
from gilkit.harness.conformance import check_comp_model_props, check_exec_model_props, check_state_props
from gilkit.harness.difftest import DiffConfig, diff_test
from gilkit.harness.frame import check_frame


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--first", type=int, default=0)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--programs", type=int, default=50)
    args = ap.parse_args()
    suites = {
        "exec": lambda s: check_exec_model_props(trials=args.trials, seed=s),
        "comp": lambda s: check_comp_model_props(trials=args.trials, seed=s),
        "state": lambda s: check_state_props(trials=args.trials, seed=s),
        "asrt": lambda s: check_asrt_props(trials=args.trials, seed=s),
        "diff": lambda s: diff_test(dc=DiffConfig(programs=args.programs, exhaustive=args.programs // 4, seed=s)),
        "frame": lambda s: check_frame(args.programs, s),
    }
    bad = 0
    for seed in range(args.first, args.first + args.seeds):
        cells = []
        for name, run in suites.items():
            solver.clear_cache()
            t = time.perf_counter()
            rep = run(seed)
            skipped = sum(p.skipped for p in rep)
            mark = "ok" if rep.passed else "FAIL " + ",".join(rep.failed_properties())
            bad += not rep.passed
            cells.append(f"{name} {mark} {time.perf_counter() - t:.1f}s" + (f" ({skipped} unknown)" if skipped else ""))
        print(f"seed {seed}: " + " | ".join(cells), flush=True)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
