"""Locating and reading the bundled data files."""

from __future__ import annotations

import csv
import hashlib
import os
from pathlib import Path

DATA_ENV = "GEOPULSE_DATA_DIR"
_BUNDLED = Path(__file__).resolve().parent / "data"


def data_dir() -> Path:
    override = os.environ.get(DATA_ENV)
    return Path(override) if override else _BUNDLED


def data_path(name: str) -> Path:
    """Path of a data file, preferring GEOPULSE_DATA_DIR when it holds one."""
    path = data_dir() / name
    if path.exists():
        return path
    return _BUNDLED / name


def read_rows(path, columns: tuple[str, ...]) -> list[dict[str, str]]:
    """Read a UTF-8 CSV with a header row; lines starting with '#' are comments."""
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.DictReader(lines)
    missing = set(columns) - set(reader.fieldnames or ())
    if missing:
        raise ValueError(f"{path}: missing columns {sorted(missing)}")
    return [{c: (row[c] or "").strip() for c in columns} for row in reader]


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]
