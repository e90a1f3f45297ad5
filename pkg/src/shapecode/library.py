"""Code libraries: per-target best codes, their JSON/CSV persistence and the
curated cross-alphabet selection."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import PrefixFreeCode, code_metrics
from .mbdist import energy_gap_db

INDEX_COLUMNS = ("target_rate", "realized_rate", "E_C", "gap_db", "kind", "M", "v", "cardinality", "file")


@dataclass
class LibraryEntry:
    target: float
    code: PrefixFreeCode
    rate: float
    energy: float
    gap_db: float
    params: dict = field(default_factory=dict)

    @classmethod
    def from_code(cls, target: float, code: PrefixFreeCode, **params) -> "LibraryEntry":
        m = code_metrics(code)
        gap = energy_gap_db(m.avg_symbol_energy, m.resolution_rate, code.alphabet)
        return cls(target, code, m.resolution_rate, m.avg_symbol_energy, gap, params)

    @property
    def M(self) -> int:
        return self.code.alphabet.M

    def row(self, filename: str = "") -> dict:
        return {
            "target_rate": repr(float(self.target)),
            "realized_rate": repr(self.rate),
            "E_C": repr(self.energy),
            "gap_db": repr(self.gap_db),
            "kind": self.code.kind,
            "M": self.M,
            "v": self.params.get("v", ""),
            "cardinality": len(self.code),
            "file": filename,
        }


def write_library(entries: Sequence[LibraryEntry], outdir, header: dict | None = None) -> Path:
    """One codebook JSON per entry plus ``index.csv``; returns the index path."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    for i, entry in enumerate(entries):
        name = f"{entry.code.kind.lower()}_m{entry.M}_{i:04d}.json"
        (outdir / name).write_text(entry.code.to_json())
        rows.append(entry.row(name))
    index = outdir / "index.csv"
    with index.open("w", newline="") as fh:
        for key, value in (header or {}).items():
            fh.write(f"# {key}: {value}\n")
        writer = csv.DictWriter(fh, fieldnames=INDEX_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    return index


def read_index(index_path) -> list[dict]:
    with open(index_path, newline="") as fh:
        return list(csv.DictReader(line for line in fh if not line.startswith("#")))


def load_library(index_path) -> list[LibraryEntry]:
    index_path = Path(index_path)
    out = []
    for row in read_index(index_path):
        code = PrefixFreeCode.from_json((index_path.parent / row["file"]).read_text())
        v = row.get("v") or ""
        params = {"v": int(v)} if v else {}
        out.append(LibraryEntry(float(row["target_rate"]), code, float(row["realized_rate"]),
                                float(row["E_C"]), float(row["gap_db"]), params))
    return out


def load_code(path) -> PrefixFreeCode:
    return PrefixFreeCode.from_json(Path(path).read_text())


@dataclass
class Selection:
    target: float
    entry: LibraryEntry | None

    @property
    def achieved(self) -> bool:
        return self.entry is not None


def select_best(entries: Iterable[LibraryEntry], targets: Sequence[float], window: float) -> list[Selection]:
    """Per target, the smallest-gap code with realized rate in
    [target - window, target + window]; ``None`` when nothing qualifies."""
    pool = list(entries)
    rates = np.array([e.rate for e in pool])
    out = []
    for t in targets:
        idx = np.flatnonzero(np.abs(rates - t) <= window + 1e-12) if pool else []
        best = min((pool[i] for i in idx), key=lambda e: (e.gap_db, len(e.code)), default=None)
        out.append(Selection(float(t), best))
    return out


def selection_table(selections: Sequence[Selection]) -> list[dict]:
    rows = []
    for s in selections:
        if s.entry is None:
            rows.append({"target_rate": s.target, "status": "unachieved"})
        else:
            e = s.entry
            rows.append({"target_rate": s.target, "status": "ok", "realized_rate": e.rate,
                         "gap_db": e.gap_db, "kind": e.code.kind, "M": e.M, "cardinality": len(e.code)})
    return rows


def dump_selection(selections: Sequence[Selection]) -> str:
    return json.dumps(selection_table(selections), indent=1)
