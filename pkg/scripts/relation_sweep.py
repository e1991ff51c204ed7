"""Run every relation check on every named space for a few lambda values.

    python3 scripts/relation_sweep.py --lam 1 1.5 2 --max-support 4
"""
from __future__ import annotations

import argparse
import sys

from gbw import SearchBudget, check_relation, named_space
from gbw.harness import RELATIONS
from gbw.sequence_space import SPACE_REGISTRY


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lam", nargs="+", type=float, default=[1.0, 2.0])
    ap.add_argument("--max-support", type=int, default=4)
    ap.add_argument("--window", type=int, default=6)
    args = ap.parse_args()
    budget = SearchBudget(max_support=args.max_support, window=args.window, max_m=2)
    failed = 0
    for sname in sorted(SPACE_REGISTRY):
        space = named_space(sname, max(args.window, 12))
        for rel in RELATIONS:
            for lam in args.lam:
                rep = check_relation(rel, space, budget, lam)
                failed += not rep.passed
                print(f"{sname:13s} {rel:20s} lam={lam:<4g} {'ok ' if rep.passed else 'FAIL'} "
                      f"{rep.instances_checked:8d}")
                if not rep.passed:
                    print("   ", rep.counterexample)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
