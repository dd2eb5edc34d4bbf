"""Reader for the solver's snapshots.csv files.

Schema: a `# manifest: key=value;...` comment line, a header row
`t,j,r_center,u,v_physical,K_invariant`, then one row per (snapshot, cell).
Only this documented schema is consumed; no physics is recomputed here.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

REQUIRED_COLUMNS = ("t", "j", "r_center", "u", "v_physical", "K_invariant")


class SchemaError(ValueError):
    """Input file missing, malformed, or lacking a required column."""


@dataclass
class SnapshotTable:
    path: str
    manifest: dict
    times: np.ndarray       # distinct snapshot times, ascending
    r: np.ndarray           # cell centers (same for every snapshot)
    columns: dict           # column name -> (n_times, n_cells) array

    @property
    def label(self) -> str:
        return self.manifest.get("scheme", Path(self.path).stem)

    def at(self, column: str, time_index: int) -> np.ndarray:
        return self.columns[column][time_index]


def _parse_manifest(line: str) -> dict:
    manifest = {}
    payload = line.split(":", 1)[1].strip()
    for item in payload.split(";"):
        if "=" in item:
            key, value = item.split("=", 1)
            manifest[key.strip()] = value.strip()
    return manifest


def read_snapshots(path) -> SnapshotTable:
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"input file not found: {path}")
    with open(path) as fh:
        first = fh.readline()
        manifest = _parse_manifest(first) if first.startswith("# manifest:") else {}
        header_line = fh.readline() if first.startswith("#") else first
        header = [h.strip() for h in header_line.strip().split(",")]
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
        try:
            raw = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise SchemaError(f"{path}: malformed data rows: {exc}") from exc
    if raw.size == 0:
        raise SchemaError(f"{path}: no data rows")
    cols = {name: raw[:, i] for i, name in enumerate(header)}
    times = np.unique(cols["t"])
    n_cells = int(np.max(cols["j"])) + 1
    if len(times) * n_cells != raw.shape[0]:
        raise SchemaError(f"{path}: ragged snapshot blocks")
    order = np.lexsort((cols["j"], cols["t"]))
    shaped = {
        name: cols[name][order].reshape(len(times), n_cells)
        for name in header
        if name not in ("t", "j")
    }
    return SnapshotTable(
        path=str(path),
        manifest=manifest,
        times=times,
        r=shaped["r_center"][0],
        columns=shaped,
    )
