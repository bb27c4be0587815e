"""Stake and project CSV ingestion, result CSV writing and run manifests."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import StakeDataError
from .games import Project

log = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12g"


@dataclass(frozen=True)
class StakeRecord:
    address: str
    stake: float


@dataclass(frozen=True)
class StakeTable:
    """Ingested stake records plus bookkeeping about what was discarded."""

    records: tuple[StakeRecord, ...]
    dropped: int = 0
    filtered: int = 0
    merged: int = 0

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def stakes(self) -> np.ndarray:
        return np.array([r.stake for r in self.records], dtype=float)


def _open_csv(path) -> list[list[str]]:
    p = Path(path)
    if not p.is_file():
        raise StakeDataError(f"no such file: {p}")
    with p.open(newline="", encoding="utf-8-sig") as fh:
        return [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]


def _column_index(header: Sequence[str], names: Sequence[str], path) -> list[int]:
    norm = [h.strip().lower() for h in header]
    missing = [n for n in names if n not in norm]
    if missing:
        raise StakeDataError(
            f"{path}: header must contain {','.join(names)} (got {','.join(header)})"
        )
    return [norm.index(n) for n in names]


def ingest_stakes(path, min_stake: float | None = None) -> StakeTable:
    """Read an ``address,stake`` CSV.

    Rows whose stake is missing, non-numeric, non-finite or not positive are
    dropped.  Repeated addresses are merged by summing their stakes.  With
    ``min_stake`` set, merged entries below it are removed as well.
    """
    rows = _open_csv(path)
    if not rows:
        raise StakeDataError(f"{path}: file is empty")
    ia, isk = _column_index(rows[0], ("address", "stake"), path)
    totals: dict[str, float] = {}
    dropped = merged = 0
    for row in rows[1:]:
        try:
            addr = row[ia].strip()
            value = float(row[isk])
        except (IndexError, ValueError):
            dropped += 1
            continue
        if not addr or not math.isfinite(value) or value <= 0:
            dropped += 1
            continue
        if addr in totals:
            merged += 1
            totals[addr] += value
        else:
            totals[addr] = value
    if dropped:
        log.warning("%s: dropped %d rows with missing or non-positive stake", path, dropped)
    if merged:
        log.warning("%s: summed %d duplicate address rows", path, merged)
    records = [StakeRecord(a, s) for a, s in totals.items()]
    filtered = 0
    if min_stake is not None:
        kept = [r for r in records if r.stake >= min_stake]
        filtered = len(records) - len(kept)
        records = kept
    if not records:
        raise StakeDataError(f"{path}: no usable stake rows")
    return StakeTable(tuple(records), dropped, filtered, merged)


def read_projects(path, n_agents: int) -> list[Project]:
    """Read an ``id,cost,approvals`` CSV; approvals are ``|``-separated
    0-based agent indices (empty for none)."""
    rows = _open_csv(path)
    if not rows:
        raise StakeDataError(f"{path}: file is empty")
    ii, ic, iv = _column_index(rows[0], ("id", "cost", "approvals"), path)
    projects = []
    for lineno, row in enumerate(rows[1:], start=2):
        try:
            pid = row[ii].strip()
            cost = float(row[ic])
            field_ = row[iv].strip() if iv < len(row) else ""
            idx = [int(t) for t in field_.split("|") if t.strip()]
        except (IndexError, ValueError) as exc:
            raise StakeDataError(f"{path}:{lineno}: malformed project row") from exc
        if not math.isfinite(cost) or cost < 0:
            raise StakeDataError(f"{path}:{lineno}: cost must be a non-negative number")
        if any(i < 0 or i >= n_agents for i in idx):
            raise StakeDataError(f"{path}:{lineno}: approval index outside 0..{n_agents - 1}")
        approvals = [False] * n_agents
        for i in idx:
            approvals[i] = True
        projects.append(Project(pid, cost, tuple(approvals)))
    return projects


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return FLOAT_FORMAT % float(v)
    return str(v)


def render_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


@dataclass
class RunManifest:
    subcommand: str
    parameters: dict
    seed: int | None
    version: str
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )
    outputs: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, default=str)


def manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


def emit(text: str, out: str | None, manifest: RunManifest | None = None) -> None:
    """Write ``text`` to ``out`` (with its manifest alongside) or to stdout."""
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    if manifest is not None:
        manifest.outputs = [path.name]
        manifest_path(path).write_text(manifest.to_json() + "\n", encoding="utf-8")
