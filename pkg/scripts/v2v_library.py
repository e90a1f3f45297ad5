"""Build a V2V library and report its energy gap band and solver statistics."""
import argparse
import time

from shapecode.library import write_library
from shapecode.v2v import build_v2v


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--nmax", type=int, default=16)
    ap.add_argument("--step", type=float, default=0.005)
    ap.add_argument("--delta", type=float, default=0.0025)
    ap.add_argument("--band", type=float, nargs=2, default=None, help="rate band for the max-gap report")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    t0 = time.perf_counter()
    lib = build_v2v(args.m, args.nmax, args.step, args.delta)
    dt = time.perf_counter() - t0
    got = lib.achieved()
    lo, hi = args.band or (0.0, float("inf"))
    band = [e for e in got if lo <= e.target <= hi]
    print(f"M={args.m} N<={args.nmax}: {len(got)}/{len(lib.rates)} grid rates achieved in {dt:.1f} s")
    if band:
        worst = max(band, key=lambda e: e.gap_db)
        print(f"max gap {worst.gap_db:.4f} dB at R*={worst.target:.3f} (|C|={len(worst.code)})")
    s = lib.stats
    print(f"{s.solves} solves, {s.infeasible} infeasible trees skipped, "
          f"{100 * s.fraction_within(10):.2f}% within 10 iterations, largest increase {s.max_increase:.3g}")
    if args.out:
        print("wrote", write_library(got, args.out, {"M": args.m, "N_max": args.nmax}))


if __name__ == "__main__":
    main()
