#!/usr/bin/env python3
"""Run every verification suite and print a one-line summary per check.

Usage: run_verification.py [--seed N] [--out report.json]
"""

import argparse
import json
import sys
import time

from nilflow.suites import SUITE_NAMES, run_suite


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    all_pass = True
    bodies = {}
    for name in SUITE_NAMES:
        t0 = time.perf_counter()
        rep = run_suite(name, args.seed)
        dt = time.perf_counter() - t0
        bodies[name] = rep.body()
        for c in rep.checks:
            mark = "ok " if c.passed else "FAIL"
            print(f"  [{mark}] {name}.{c.name}")
        status = "pass" if rep.passed else "FAIL"
        print(f"{name}: {status}  ({dt:.1f}s)")
        all_pass &= rep.passed
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(bodies, fh, indent=2)
    print("overall:", "pass" if all_pass else "FAIL")
    return 0 if all_pass else 1


if __name__ == "__main__":
    sys.exit(main())
