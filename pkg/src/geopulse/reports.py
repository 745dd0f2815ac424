"""Deterministic CSV/JSON report writers.

Every CSV starts with ``# geopulse <version> config=<hash>``; JSON files carry
the same information under ``_meta``. Floats are written with 10 significant
digits so reports are byte-stable across platforms.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from . import __version__


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if x == 0:
            return "0"
        return format(x, ".10g")
    return str(x)


def sig(x):
    """Round a float to the precision reports are written with."""
    return float(format(x, ".10g")) if isinstance(x, float) and math.isfinite(x) else x


def header_line(config_hash: str) -> str:
    return f"# geopulse {__version__} config={config_hash}\n"


def write_csv(path, columns, rows, config_hash: str) -> Path:
    buf = io.StringIO()
    buf.write(header_line(config_hash))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    path = Path(path)
    path.write_bytes(buf.getvalue().encode("utf-8"))
    return path


def write_json(path, payload: dict, config_hash: str) -> Path:
    doc = {"_meta": {"tool": "geopulse", "version": __version__, "config": config_hash}}
    doc.update(payload)
    path = Path(path)
    text = json.dumps(doc, indent=2, sort_keys=True, default=_jsonable) + "\n"
    path.write_bytes(text.encode("utf-8"))
    return path


def _jsonable(o):
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o)}")


def read_csv(path) -> list[dict[str, str]]:
    """Read a report CSV back, skipping the leading comment line."""
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))
