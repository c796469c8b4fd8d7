"""JSON-lines cache of per-D scan records.

One record per line, keys sorted, integers written as decimal strings. Lines
that do not parse or lack the schema tag are reported as corrupt and dropped
when the file is compacted.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .stats import SCHEMA

REQUIRED_KEYS = ("schema", "version", "D", "N", "config", "points")


class CacheConflict(ValueError):
    pass


@dataclass
class CacheContents:
    records: dict = field(default_factory=dict)  # D -> record
    corrupt: list = field(default_factory=list)  # (line number, raw text)


def dumps(rec: dict) -> str:
    return json.dumps(rec, sort_keys=True, separators=(",", ":"))


def _valid(rec) -> bool:
    return isinstance(rec, dict) and rec.get("schema") == SCHEMA and all(k in rec for k in REQUIRED_KEYS)


def read_cache(path: str | Path) -> CacheContents:
    out = CacheContents()
    path = Path(path)
    if not path.exists():
        return out
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                out.corrupt.append((lineno, line.rstrip("\n")))
                continue
            if not _valid(rec):
                out.corrupt.append((lineno, line.rstrip("\n")))
                continue
            # later lines win: a re-run appends fresher records
            out.records[int(rec["D"])] = rec
    return out


def append_record(path: str | Path, rec: dict):
    with open(path, "a") as fh:
        fh.write(dumps(rec) + "\n")
        fh.flush()


def write_cache(path: str | Path, records) -> None:
    """Atomically rewrite ``path`` with records sorted by D."""
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        for rec in sorted(records, key=lambda r: int(r["D"])):
            fh.write(dumps(rec) + "\n")
    os.replace(tmp, path)


def merge_caches(paths) -> CacheContents:
    """Union of shard caches; identical duplicates collapse, differing ones conflict."""
    out = CacheContents()
    for path in paths:
        part = read_cache(path)
        out.corrupt.extend((f"{path}:{n}", raw) for n, raw in part.corrupt)
        for D, rec in part.records.items():
            old = out.records.get(D)
            if old is not None and dumps(old) != dumps(rec):
                raise CacheConflict(f"D={D} has differing records across shards")
            out.records[D] = rec
    return out
