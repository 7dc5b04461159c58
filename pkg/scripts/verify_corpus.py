"""Verify the bundled specification corpus and check each Verified spec under random frames.

Usage: python3 scripts/verify_corpus.py [--frames 100] [--seed 0]
"""

import argparse
import random
import sys
import time

from gilkit.corpus import specs_source
from gilkit.parser import parse_program
from gilkit.verification import Verdict, check_compositionality, random_frame, verify_all


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frames", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    t = time.perf_counter()
    corpus = parse_program(specs_source())
    rng = random.Random(args.seed)
    failures = 0
    for r in verify_all(corpus):
        line = f"{r.spec:<15} {r.verdict.value}"
        if r.verdict is Verdict.VERIFIED:
            spec = corpus.specs[r.spec]
            bad = sum(check_compositionality(corpus, spec, random_frame(rng, spec)).verdict is not Verdict.VERIFIED
                      for _ in range(args.frames))
            failures += bad
            line += f"   framed: {args.frames - bad}/{args.frames}"
        elif r.reason:
            line += f"   ({r.reason})"
        print(line)
    print(f"{time.perf_counter() - t:.1f}s")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
