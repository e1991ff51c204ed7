"""Run the three construction checks at full exhaustive budgets and save the reports.

    python3 scripts/run_constructions.py --out results/constructions.json
"""
from __future__ import annotations

import argparse
import json
import time
from pathlib import Path

from gbw import SearchBudget, check_construction

RUNS = {
    "renormed_l1": ({"lam": 2.0},
                    SearchBudget(max_support=8, window=12, max_m=3, coeff_grid=(-2, -1, -0.5, 0.5, 1, 2))),
    "schreier_m7": ({"k_list": [4, 16, 64, 256], "lam": 2.0}, SearchBudget(max_support=7, window=12)),
    "schreier_em3": ({}, SearchBudget(max_support=8, window=12, max_m=3, coeff_grid=(-1, -0.5, 0.5, 1))),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/constructions.json")
    ap.add_argument("--only", choices=sorted(RUNS))
    args = ap.parse_args()
    reports = {}
    for name, (params, budget) in RUNS.items():
        if args.only and name != args.only:
            continue
        t0 = time.perf_counter()
        rep = check_construction(name, params, budget)
        dt = time.perf_counter() - t0
        reports[name] = {**rep.to_json(), "budget": budget.to_json(), "params": params, "seconds": round(dt, 2)}
        status = "passed" if rep.passed else "FAILED"
        print(f"{name:14s} {status:7s} {rep.instances_checked:>10d} instances  {dt:7.1f}s  "
              + "  ".join(f"{k}={v:.6g}" for k, v in sorted(rep.metrics.items())))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(reports, indent=2, sort_keys=True) + "\n")
    return 0 if all(r["passed"] for r in reports.values()) else 1


if __name__ == "__main__":
    raise SystemExit(main())
