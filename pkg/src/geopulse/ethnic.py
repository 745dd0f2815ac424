"""Chinese-surname detection on Twitter handles."""

from __future__ import annotations

import re

from .resources import data_path

N_SURNAMES = 85

SEGMENT = "segment"
SUBSTRING = "substring"

_LETTER_RUNS = re.compile(r"[^\W\d_]+")


class SurnameList:
    def __init__(self, names):
        self.names = frozenset(n.strip().lower() for n in names if n.strip())

    @classmethod
    def from_file(cls, path=None, strict=True) -> "SurnameList":
        with open(path or data_path("surnames.txt"), encoding="utf-8") as fh:
            names = [ln for ln in fh if ln.strip() and not ln.startswith("#")]
        lst = cls(names)
        if strict and len(lst.names) != N_SURNAMES:
            raise ValueError(f"surname list has {len(lst.names)} names, expected {N_SURNAMES}")
        return lst

    def __len__(self):
        return len(self.names)

    def __contains__(self, name):
        return name in self.names


def segments(screen_name: str) -> list[str]:
    """Lowercased maximal letter runs; digits, underscores and punctuation split."""
    return _LETTER_RUNS.findall(screen_name.lower())


def _segment_matches(seg: str, names: frozenset[str]) -> bool:
    if seg in names:
        return True
    # "yuwang": a surname at either end whose remainder is itself a surname
    for name in names:
        if len(seg) > len(name):
            if seg.startswith(name) and seg[len(name):] in names:
                return True
            if seg.endswith(name) and seg[: -len(name)] in names:
                return True
    return False


def is_chinese(screen_name: str, l: SurnameList, mode: str = SEGMENT) -> bool:
    if mode == SUBSTRING:
        low = screen_name.lower()
        return any(name in low for name in l.names)
    if mode != SEGMENT:
        raise ValueError(f"unknown surname match mode {mode!r}")
    return any(_segment_matches(seg, l.names) for seg in segments(screen_name))
