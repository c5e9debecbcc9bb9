"""Build every valid (n,k,delta) in a grid and verify MDS and repair optimality.

    python scripts/sweep.py --max-n 10 --max-r 4 --max-mds-size 1024 [--csv out.csv]

Codes whose MDS check would need r*N larger than --max-mds-size are built and
repair-checked but the exhaustive MDS check is skipped (reported as "skip").
"""

import argparse
import csv
import os
import sys
import time

import numpy as np

from mdsx.builder import build
from mdsx.code_model import encode, is_mds
from mdsx.repair import check_repair_systems, repair


def grid(max_n, max_r):
    for n in range(3, max_n + 1):
        for r in range(2, min(max_r, n - 1) + 1):
            for delta in range(2, r + 1):
                yield n, n - r, delta


def run_one(n, k, delta, max_mds, rng):
    t0 = time.perf_counter()
    b = build(n, k, delta, keep_intermediates=False)
    r = n - k
    mds = "skip"
    if r * b.N <= max_mds:
        mds = "ok" if is_mds(b.code) else "FAIL"
    systems = check_repair_systems(b.code, b.plans, delta)
    exact = "skip"
    if r * b.N <= max_mds:
        cw = encode(b.code, b.code.field.random((k * b.N,), rng))
        exact = "ok" if all(np.array_equal(repair(b, cw, i)[0], cw[i]) for i in range(n)) else "FAIL"
    d = k + delta - 1
    return {
        "n": n, "k": k, "delta": delta, "tau": b.tau, "N": b.N, "q": b.code.q,
        "d": d, "per_helper": b.N // delta, "bound": d * b.N // delta,
        "mds": mds, "repair_systems": "ok" if systems else "FAIL", "repair_exact": exact,
        "seconds": round(time.perf_counter() - t0, 2),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=10)
    ap.add_argument("--max-r", type=int, default=4)
    ap.add_argument("--max-mds-size", type=int, default=256)
    ap.add_argument("--csv", help="also write rows to this CSV file")
    args = ap.parse_args()
    rng = np.random.default_rng(int(os.environ.get("MDSX_SEED", "0")))

    rows = []
    for params in grid(args.max_n, args.max_r):
        row = run_one(*params, args.max_mds_size, rng)
        rows.append(row)
        print("  ".join(f"{key}={val}" for key, val in row.items()), flush=True)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    failed = [r for r in rows if "FAIL" in (r["mds"], r["repair_systems"], r["repair_exact"])]
    print(f"{len(rows)} codes, {len(failed)} failures")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
