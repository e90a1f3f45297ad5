"""Energy gap of V2F codes with |C| <= 4096 for 2-, 4-, 8- and 16-ASK.

Writes one CSV per alphabet: target, realized rate, E_C, gap, v.
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from shapecode.v2f import sweep_v2f


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alphabets", type=int, nargs="+", default=[2, 4, 8, 16])
    ap.add_argument("--step", type=float, default=0.01)
    ap.add_argument("--out", default="results/v2f")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for M in args.alphabets:
        top = int(np.log2(M))
        grid = np.round(np.arange(1, int(round(top / args.step)) + 1) * args.step, 12)
        entries = sweep_v2f(M, 12, grid)
        path = out / f"v2f_m{M}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["target", "rate", "E_C", "gap_db", "v"])
            for t, e in zip(grid, entries):
                if e is not None:
                    w.writerow([t, e.rate, e.energy, e.gap_db, e.params["v"]])
        gaps = [e.gap_db for e in entries if e is not None]
        print(f"M={M}: {len(gaps)} targets, max gap {max(gaps):.4f} dB -> {path}")


if __name__ == "__main__":
    main()
