"""Best code per target rate across 2- to 16-ASK libraries.

V2V libraries for 2- and 4-ASK (N <= 32 by default) and V2F codes with
|C| <= 4096 for 8- and 16-ASK are pooled; each target takes the smallest
gap code within the selection window.
"""
import argparse

import numpy as np

from shapecode.library import select_best, selection_table
from shapecode.v2f import all_v2f_codes
from shapecode.v2v import build_v2v


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nmax", type=int, default=32)
    ap.add_argument("--window", type=float, default=0.02)
    args = ap.parse_args()
    pool = []
    for M in (2, 4):
        pool += build_v2v(M, args.nmax).achieved()
        print(f"V2V M={M} done")
    for M, v_max in ((8, 4), (16, 3)):
        grid = np.round(np.arange(1, 100 * int(np.log2(M)) + 1) * 0.01, 12)
        pool += all_v2f_codes(M, v_max, grid)
    targets = np.round(0.15 + 0.16 * np.arange(24), 12)
    for row in selection_table(select_best(pool, targets, args.window)):
        if row["status"] == "ok":
            print(f"{row['target_rate']:.2f}  R={row['realized_rate']:.4f}  gap={row['gap_db']:.4f} dB  "
                  f"{row['kind']} M={row['M']} |C|={row['cardinality']}")
        else:
            print(f"{row['target_rate']:.2f}  unachieved")


if __name__ == "__main__":
    main()
