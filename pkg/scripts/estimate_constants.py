"""Table of constant estimates for every kind on the named spaces.

    python3 scripts/estimate_constants.py --lam 1 2 --max-support 4 --csv results/constants.csv
"""
from __future__ import annotations

import argparse
import csv
import json
import sys

from gbw import CONSTANT_TAGS, ConstantKind, SearchBudget, estimate_constant, named_space
from gbw.constants import LAMBDA_FREE
from gbw.sequence_space import SPACE_REGISTRY


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--spaces", nargs="+", default=sorted(SPACE_REGISTRY))
    ap.add_argument("--kinds", nargs="+", default=list(CONSTANT_TAGS))
    ap.add_argument("--lam", nargs="+", type=float, default=[1.0, 2.0])
    ap.add_argument("--max-support", type=int, default=4)
    ap.add_argument("--window", type=int, default=6)
    ap.add_argument("--csv", help="also write the table here")
    args = ap.parse_args()
    budget = SearchBudget(max_support=args.max_support, window=args.window)
    rows = []
    for sname in args.spaces:
        space = named_space(sname, max(args.window, 12))
        for tag in args.kinds:
            for lam in ([1.0] if tag in LAMBDA_FREE else args.lam):
                est = estimate_constant(space, ConstantKind(tag, lam), budget)
                rows.append({"space": sname, "kind": tag, "lambda": lam, "value": est.value,
                             "empty": est.empty, "instances": est.instances,
                             "witness": json.dumps(est.witness, sort_keys=True)})
                print(f"{sname:13s} {str(ConstantKind(tag, lam)):22s} {est.value:10.6f}"
                      + ("  (empty)" if est.empty else ""))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
