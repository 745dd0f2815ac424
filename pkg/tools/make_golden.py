"""Regenerate tests/golden/ from the bundled sample corpus.

Run after an intentional change to report contents, then review the diff:

    python3 tools/make_golden.py
"""

import shutil
import sys
from pathlib import Path

from geopulse import cli
from geopulse.resources import data_path

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = ROOT / "tests" / "golden"
EXTERNAL = ROOT / "tests" / "data" / "external_index.csv"


def run_bundle(out: Path, threads: int = 1) -> list[int]:
    common = ["--out", str(out), "--threads", str(threads)]
    return [
        cli.main(["ingest", str(data_path("sample_corpus.jsonl")), *common]),
        cli.main(["analyze", "--external", str(EXTERNAL), *common]),
        cli.main(["regress", *common]),
        cli.main(["validate-sentiment", *common]),
    ]


if __name__ == "__main__":
    if GOLDEN.exists():
        shutil.rmtree(GOLDEN)
    codes = run_bundle(GOLDEN)
    if any(codes):
        sys.exit(f"pipeline exit codes {codes}")
    print(f"wrote {len(list(GOLDEN.iterdir()))} files to {GOLDEN}")
