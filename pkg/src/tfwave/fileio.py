"""Deterministic CSV/JSON writers and config hashing for reproducible runs.

Every output file embeds the version and the SHA-256 of the canonical
config document; no timestamps, so identical config + seed reproduces
byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from . import __version__

__all__ = ["config_hash", "write_csv", "write_json", "read_observation_csv"]


def config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    return format(float(x), ".17g")


def write_csv(path, header: list[str], rows, meta: dict | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    if meta:
        for k in sorted(meta):
            lines.append(f"# {k}={meta[k]}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def write_json(path, payload: dict, meta: dict | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = dict(payload)
    if meta:
        doc["meta"] = meta
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def standard_meta(config: dict, command: str) -> dict:
    return {
        "version": __version__,
        "command": command,
        "config_sha256": config_hash(config),
    }


def read_observation_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read (t, value) columns from a CSV with optional '#' comments and a
    header row."""
    ts, vs = [], []
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        try:
            t, v = float(parts[0]), float(parts[1])
        except ValueError:
            continue  # header row
        ts.append(t)
        vs.append(v)
    if not ts:
        raise ValueError(f"no (t, value) rows found in {path}")
    return np.asarray(ts), np.asarray(vs)
