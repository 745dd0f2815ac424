"""Gazetteer matching: place strings to U.S. states, tweet text to provinces."""

from __future__ import annotations

import re
import string
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

from .resources import data_path, read_rows

ABBREVIATION = "abbreviation"
FULL_NAME = "full_name"
N_STATES = 51
N_PROVINCES = 31

STATE_IDS = (
    "AK", "AL", "AR", "AZ", "CA", "CO", "CT", "DC", "DE", "FL", "GA", "HI", "IA",
    "ID", "IL", "IN", "KS", "KY", "LA", "MA", "MD", "ME", "MI", "MN", "MO", "MS",
    "MT", "NC", "ND", "NE", "NH", "NJ", "NM", "NV", "NY", "OH", "OK", "OR", "PA",
    "RI", "SC", "SD", "TN", "TX", "UT", "VA", "VT", "WA", "WI", "WV", "WY",
)
PROVINCE_IDS = (
    "Anhui", "Beijing", "Chongqing", "Fujian", "Gansu", "Guangdong", "Guangxi",
    "Guizhou", "Hainan", "Hebei", "Heilongjiang", "Henan", "Hubei", "Hunan",
    "Inner Mongolia", "Jiangsu", "Jiangxi", "Jilin", "Liaoning", "Ningxia",
    "Qinghai", "Shaanxi", "Shandong", "Shanghai", "Shanxi", "Sichuan", "Tianjin",
    "Tibet", "Xinjiang", "Yunnan", "Zhejiang",
)

_PLACE_SPLIT = re.compile(r"[,\s]+")


@dataclass(frozen=True)
class Pattern:
    surface: str
    kind: str


def _phrase_regex(phrase: str) -> re.Pattern:
    """Case-insensitive phrase anchored on non-alphanumeric boundaries."""
    body = r"\s+".join(re.escape(w) for w in phrase.split())
    return re.compile(r"(?<![^\W_])" + body + r"(?![^\W_])", re.IGNORECASE)


class StateGazetteer:
    """StateId -> patterns. Abbreviations are exact case-sensitive tokens of the
    place string; full names are case-insensitive whole-token phrases."""

    def __init__(self, entries: Mapping[str, set[Pattern] | frozenset[Pattern]]):
        self.entries = MappingProxyType({k: frozenset(v) for k, v in entries.items()})
        self._abbrev: dict[str, set[str]] = {}
        self._phrases: dict[tuple[str, ...], set[str]] = {}
        for sid, patterns in self.entries.items():
            for pat in patterns:
                if pat.kind == ABBREVIATION:
                    self._abbrev.setdefault(pat.surface, set()).add(sid)
                elif pat.kind == FULL_NAME:
                    key = tuple(_norm_token(w) for w in pat.surface.split())
                    self._phrases.setdefault(key, set()).add(sid)
                else:
                    raise ValueError(f"unknown pattern kind {pat.kind!r} for {sid}")
        self._lengths = sorted({len(k) for k in self._phrases})

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.entries))

    @classmethod
    def from_csv(cls, path=None, strict=True) -> "StateGazetteer":
        entries: dict[str, set[Pattern]] = {}
        for row in read_rows(path or data_path("states.csv"), ("id", "surface", "kind")):
            entries.setdefault(row["id"], set()).add(Pattern(row["surface"], row["kind"]))
        if strict:
            if len(entries) != N_STATES:
                raise ValueError(f"state gazetteer has {len(entries)} ids, expected {N_STATES}")
            for sid, pats in entries.items():
                if {p.kind for p in pats} != {ABBREVIATION, FULL_NAME}:
                    raise ValueError(f"{sid} needs both an abbreviation and a full name")
        return cls(entries)

    def attribute(self, place: str | None) -> frozenset[str]:
        if not place:
            return frozenset()
        raw = [t for t in _PLACE_SPLIT.split(place) if t]
        found: set[str] = set()
        for tok in raw:
            found |= self._abbrev.get(tok, set())
            bare = tok.strip(string.punctuation)
            if bare != tok:
                found |= self._abbrev.get(bare, set())
        norm = [_norm_token(t) for t in raw]
        for n in self._lengths:
            for i in range(len(norm) - n + 1):
                found |= self._phrases.get(tuple(norm[i : i + n]), set())
        return frozenset(found)


def _norm_token(tok: str) -> str:
    return tok.strip(string.punctuation).casefold()


class ProvinceGazetteer:
    def __init__(self, entries: Mapping[str, set[str] | frozenset[str]]):
        self.entries = MappingProxyType({k: frozenset(v) for k, v in entries.items()})
        # one regex per variant so no variant can shadow another
        self._patterns = [
            (pid, _phrase_regex(name))
            for pid in sorted(self.entries)
            for name in sorted(self.entries[pid])
            if name.split()
        ]

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.entries))

    @classmethod
    def from_csv(cls, path=None, strict=True) -> "ProvinceGazetteer":
        entries: dict[str, set[str]] = {}
        for row in read_rows(path or data_path("provinces.csv"), ("id", "surface", "kind")):
            entries.setdefault(row["id"], set()).add(row["surface"])
        if strict and len(entries) != N_PROVINCES:
            raise ValueError(f"province gazetteer has {len(entries)} ids, expected {N_PROVINCES}")
        return cls(entries)

    def attribute(self, text: str) -> frozenset[str]:
        if not text:
            return frozenset()
        return frozenset(pid for pid, rx in self._patterns if rx.search(text))


def _phrase_key(phrase: str) -> str:
    return " ".join(phrase.casefold().split())


class StopList:
    def __init__(self, phrases=()):
        self.phrases = frozenset(_phrase_key(p) for p in phrases if p.strip())
        self._patterns = [_phrase_regex(p) for p in sorted(self.phrases)]

    @classmethod
    def from_csv(cls, path=None) -> "StopList":
        rows = read_rows(path or data_path("stoplist.csv"), ("id", "surface", "kind"))
        return cls(row["surface"] for row in rows)

    def passes(self, text: str) -> bool:
        text = text or ""
        return not any(rx.search(text) for rx in self._patterns)


def attribute_states(place_full_name: str | None, g: StateGazetteer) -> frozenset[str]:
    return g.attribute(place_full_name)


def attribute_provinces(text: str, g: ProvinceGazetteer) -> frozenset[str]:
    return g.attribute(text)


def passes_stoplist(text: str, s: StopList) -> bool:
    return s.passes(text)
