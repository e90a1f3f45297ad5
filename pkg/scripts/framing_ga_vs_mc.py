"""Framed energy gap of the Table I(c) code: Gaussian approximation against
Monte-Carlo for a range of frame lengths at a fixed frame rate."""
import argparse

from shapecode.core import canonical_table1c
from shapecode.framing import FrameConfig
from shapecode.ga import ga_analyze
from shapecode.mc import mc_energy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rate", type=float, default=0.36)
    ap.add_argument("--lengths", type=int, nargs="+", default=[100, 300, 1000, 3000, 10000])
    ap.add_argument("--frames", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    code = canonical_table1c()
    print(f"{'n':>6} {'k':>6} {'GA dB':>8} {'MC dB':>8} {'switched':>9}")
    for n in args.lengths:
        k = int(round(args.rate * n))
        ga = ga_analyze(code, None, k, n)
        mc = mc_energy(FrameConfig(k, n, code), args.frames, args.seed)
        print(f"{n:>6} {k:>6} {ga.gap_db:8.4f} {mc.gap_db:8.4f} {mc.switch_fraction:9.3f}")


if __name__ == "__main__":
    main()
