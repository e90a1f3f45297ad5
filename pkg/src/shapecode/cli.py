"""``shapecode`` command line: construct, export, encode, decode, analyze,
simulate, selftest."""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import PrefixFreeCode, canonical_table1c, code_metrics, validate_code
from .framing import FrameConfig, FrameConfigError, CorruptFrameError, decode_frame, encode_frame, pack_bits, unpack_bits
from .ga import ga_analyze
from .library import LibraryEntry, dump_selection, load_code, load_library, select_best, selection_table, write_library
from .mc import RNG_ALGORITHM, mc_energy, roundtrip_matrix
from .v2f import all_v2f_codes, check_v2f_args, sweep_v2f
from .v2v import build_f2v, build_v2v


def parse_range(text: str) -> np.ndarray:
    """``start:step:stop`` (inclusive, to within half a step) or a comma list."""
    if ":" in text:
        start, step, stop = (float(v) for v in text.split(":"))
        if step <= 0:
            raise argparse.ArgumentTypeError("range step must be positive")
        count = int(math.floor((stop - start) / step + 0.5)) + 1
        return np.round(start + step * np.arange(count), 12)
    return np.array([float(v) for v in text.split(",")])


def threads() -> int:
    # construction is single-process; the variable is read so callers can cap it
    return max(1, int(os.environ.get("SHAPECODE_THREADS", "1")))


def provenance(args, **extra) -> dict:
    params = {k: (v.tolist() if isinstance(v, np.ndarray) else v)
              for k, v in vars(args).items() if k not in ("func",)}
    return {"tool": f"shapecode {__version__}", "params": json.dumps(params, default=str),
            "threads": threads(), **extra}


def _load_c1(path, m: int) -> PrefixFreeCode:
    code = load_code(path)
    if code.alphabet.M != m:
        raise SystemExit(f"error: codebook is {code.alphabet.M}-ASK but --m {m} was given")
    report = validate_code(code)
    if not report.ok:
        raise SystemExit("error: invalid codebook: " + "; ".join(report.problems))
    return code


def cmd_construct(args) -> int:
    header = provenance(args)
    if args.kind == "v2f":
        if args.rates is None:
            raise SystemExit("error: v2f needs --rates")
        if args.v is not None:
            for r in args.rates:
                check_v2f_args(args.m, args.v, float(r))
            entries = [e for e in all_v2f_codes(args.m, args.v, args.rates) if e.params["v"] == args.v]
        else:
            entries = [e for e in sweep_v2f(args.m, args.vmax, args.rates) if e is not None]
    elif args.kind == "f2v":
        if args.u is None or args.rate is None:
            raise SystemExit("error: f2v needs --u and --rate")
        code = build_f2v(args.m, args.u, args.rate)
        entries = [LibraryEntry.from_code(args.rate, code, u=args.u)]
    else:
        lib = build_v2v(args.m, args.nmax, args.step, args.delta)
        entries = lib.achieved()
        stats = lib.stats
        header["solves"] = stats.solves
        header["within_10_iterations"] = stats.fraction_within(10)
        header["unachieved_rates"] = sum(e is None for e in lib.entries)
    index = write_library(entries, args.out, header)
    print(f"wrote {len(entries)} codes to {index}")
    return 0


def cmd_export(args) -> int:
    pool = []
    for path in args.libs:
        if not Path(path).exists():
            raise SystemExit(f"error: missing library {path}")
        pool.extend(load_library(path))
    selections = select_best(pool, args.targets, args.window)
    rows = selection_table(selections)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "selected.json").write_text(dump_selection(selections))
        chosen = [s.entry for s in selections if s.entry is not None]
        write_library(chosen, out / "codes", provenance(args))
    for row in rows:
        if row["status"] == "ok":
            print(f"{row['target_rate']:.4f}  R={row['realized_rate']:.4f}  gap={row['gap_db']:.4f} dB"
                  f"  {row['kind']} M={row['M']} |C|={row['cardinality']}")
        else:
            print(f"{row['target_rate']:.4f}  unachieved")
    return 0


def _read_stdin() -> bytes:
    return sys.stdin.buffer.read()


def cmd_encode(args) -> int:
    config = FrameConfig(args.k, args.n, _load_c1(args.codebook, args.m))
    data = _read_stdin()
    bits = unpack_bits(data)
    if len(bits) % args.k:
        if not args.pad_zeros:
            raise SystemExit(f"error: {len(bits)} input bits is not a multiple of k={args.k} (use --pad-zeros)")
        bits = np.concatenate([bits, np.zeros(-len(bits) % args.k, dtype=np.uint8)])
    out = sys.stdout.buffer
    for i in range(0, len(bits), args.k):
        out.write(encode_frame(config, bits[i : i + args.k]).tobytes())
    out.flush()
    return 0


def cmd_decode(args) -> int:
    config = FrameConfig(args.k, args.n, _load_c1(args.codebook, args.m))
    data = np.frombuffer(_read_stdin(), dtype=np.uint8)
    if len(data) % args.n:
        raise SystemExit(f"error: {len(data)} symbols is not a multiple of n={args.n}")
    try:
        bits = [decode_frame(config, data[i : i + args.n]) for i in range(0, len(data), args.n)]
    except CorruptFrameError as exc:
        raise SystemExit(f"error: corrupt frame: {exc}")
    flat = np.concatenate(bits) if bits else np.zeros(0, dtype=np.uint8)
    sys.stdout.buffer.write(pack_bits(flat))
    sys.stdout.buffer.flush()
    return 0


def cmd_analyze(args) -> int:
    code = _load_c1(args.codebook, args.m)
    res = ga_analyze(code, None, args.k, args.n)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            for key, value in provenance(args).items():
                fh.write(f"# {key}: {value}\n")
            writer = csv.DictWriter(fh, fieldnames=["t", "xi", "mu", "sigma2", "phi_switch",
                                                    "phi_end", "Phi_switch", "Phi_end"])
            writer.writeheader()
            for row in res.rows():
                writer.writerow({k: repr(float(v)) if k != "t" else int(v) for k, v in row.items()})
    print(json.dumps({"E_frame": res.energy, "gap_db": res.gap_db,
                      "R_C1": res.model.mean, "S2": res.model.variance}))
    return 0


def cmd_simulate(args) -> int:
    code = _load_c1(args.codebook, args.m)
    res = mc_energy(FrameConfig(args.k, args.n, code), args.frames, args.seed)
    summary = {**provenance(args), **res.summary()}
    if args.out:
        prefix = Path(args.out)
        prefix.parent.mkdir(parents=True, exist_ok=True)
        Path(f"{prefix}.json").write_text(json.dumps(summary, indent=1))
        with open(f"{prefix}_hist.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["position", "switch_count", "termination_count"])
            for pos in np.flatnonzero(res.switch_hist + res.end_hist):
                writer.writerow([int(pos), int(res.switch_hist[pos]), int(res.end_hist[pos])])
    print(json.dumps(summary))
    return 0


def cmd_selftest(args) -> int:
    code = canonical_table1c()
    m = code_metrics(code)
    checks = {
        "table1c_rate": abs(m.resolution_rate - 0.3613) <= 5e-4,
        "table1c_energy": abs(m.avg_symbol_energy - 10.140625 / 6.140625) < 1e-12,
    }
    try:
        roundtrip_matrix([code], [(9, 24), (36, 100), (360, 1000)], frames=20, seed=args.seed)
        checks["roundtrip"] = True
    except AssertionError:
        checks["roundtrip"] = False
    for name, ok in checks.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return 0 if all(checks.values()) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shapecode", description=__doc__)
    p.add_argument("--version", action="version", version=f"shapecode {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a code library")
    c.add_argument("kind", choices=["v2f", "f2v", "v2v"])
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--v", type=int, help="v2f: every code at this codeword length")
    c.add_argument("--vmax", type=int, default=12, help="v2f: best code per target over v <= vmax")
    c.add_argument("--u", type=int)
    c.add_argument("--rate", type=float)
    c.add_argument("--rates", type=parse_range)
    c.add_argument("--nmax", type=int, default=16)
    c.add_argument("--step", type=float, default=0.005)
    c.add_argument("--delta", type=float, default=0.0025)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", default="library")
    c.set_defaults(func=cmd_construct)

    e = sub.add_parser("export", help="curated best-per-target selection across libraries")
    e.add_argument("libs", nargs="+", help="index.csv files")
    e.add_argument("--targets", type=parse_range, required=True)
    e.add_argument("--window", type=float, default=0.02)
    e.add_argument("--out")
    e.set_defaults(func=cmd_export)

    for name, fn, helptext in (("encode", cmd_encode, "bits on stdin -> frames on stdout"),
                               ("decode", cmd_decode, "frames on stdin -> bits on stdout")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--codebook", required=True)
        s.add_argument("--m", type=int, required=True)
        s.add_argument("--k", type=int, required=True)
        s.add_argument("--n", type=int, required=True)
        if name == "encode":
            s.add_argument("--pad-zeros", action="store_true")
        s.set_defaults(func=fn)

    a = sub.add_parser("analyze", help="Gaussian-approximation framing analysis")
    for flag in ("--m", "--k", "--n"):
        a.add_argument(flag, type=int, required=True)
    a.add_argument("--codebook", required=True)
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    m = sub.add_parser("simulate", help="Monte-Carlo framed energy")
    for flag in ("--m", "--k", "--n"):
        m.add_argument(flag, type=int, required=True)
    m.add_argument("--codebook", required=True)
    m.add_argument("--frames", type=int, default=10000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--out")
    m.set_defaults(func=cmd_simulate)

    t = sub.add_parser("selftest", help="quick sanity checks")
    t.add_argument("--seed", type=int, default=0)
    t.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FrameConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
