"""Tweet ingestion: parsing, validation, dedup and per-author features.

Input is newline-delimited JSON holding a subset of the Twitter REST tweet
object. A line that cannot become a :class:`TweetRecord` raises
:class:`RejectedRecord` carrying one of ``syntax``, ``schema`` or ``clock``.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from typing import Iterable, Iterator, Sequence

log = logging.getLogger(__name__)

TWITTER_TIME = "%a %b %d %H:%M:%S %z %Y"
CHUNK = 512


class RejectedRecord(ValueError):
    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason
        self.detail = detail


@dataclass(frozen=True)
class TweetRecord:
    tweet_id: str
    text: str
    created_at: datetime
    user_screen_name: str
    user_created_at: datetime
    followers: int
    followees: int
    statuses_count: int
    retweet_count: int
    is_reply: bool = False
    place_full_name: str | None = None


@dataclass(frozen=True)
class UserFeatures:
    experience_days: int
    intensity: float


def parse_time(value) -> datetime:
    """Twitter's ``Wed Mar 11 12:00:00 +0000 2015`` or ISO-8601, as aware UTC."""
    if not isinstance(value, str) or not value.strip():
        raise ValueError(f"not a timestamp: {value!r}")
    value = value.strip()
    try:
        ts = datetime.strptime(value, TWITTER_TIME)
    except ValueError:
        iso = value[:-1] + "+00:00" if value.endswith(("Z", "z")) else value
        ts = datetime.fromisoformat(iso)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _get(obj, dotted):
    cur = obj
    for part in dotted.split("."):
        if not isinstance(cur, dict) or part not in cur or cur[part] is None:
            raise RejectedRecord("schema", f"missing {dotted}")
        cur = cur[part]
    return cur


def _count(obj, dotted) -> int:
    value = _get(obj, dotted)
    # bool is an int subclass; JSON true is not a count
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise RejectedRecord("schema", f"{dotted} is not a non-negative integer")
    return value


def _string(obj, dotted, allow_empty=True) -> str:
    value = _get(obj, dotted)
    if not isinstance(value, str) or (not allow_empty and not value):
        raise RejectedRecord("schema", f"{dotted} is not a string")
    return value


def _time(obj, dotted) -> datetime:
    try:
        return parse_time(_get(obj, dotted))
    except ValueError as exc:
        if isinstance(exc, RejectedRecord):
            raise
        raise RejectedRecord("schema", f"bad timestamp in {dotted}") from None


def parse_record(line: str) -> TweetRecord:
    try:
        obj = json.loads(line)
    except (json.JSONDecodeError, TypeError):
        raise RejectedRecord("syntax") from None
    if not isinstance(obj, dict):
        raise RejectedRecord("syntax", "not a JSON object")

    place = obj.get("place")
    place_name = None
    if isinstance(place, dict) and isinstance(place.get("full_name"), str):
        place_name = place["full_name"]

    rec = TweetRecord(
        tweet_id=_string(obj, "id_str", allow_empty=False),
        text=_string(obj, "text"),
        created_at=_time(obj, "created_at"),
        user_screen_name=_string(obj, "user.screen_name"),
        user_created_at=_time(obj, "user.created_at"),
        followers=_count(obj, "user.followers_count"),
        followees=_count(obj, "user.friends_count"),
        statuses_count=_count(obj, "user.statuses_count"),
        retweet_count=_count(obj, "retweet_count"),
        is_reply=obj.get("in_reply_to_status_id") is not None,
        place_full_name=place_name,
    )
    if rec.user_created_at > rec.created_at:
        raise RejectedRecord("clock", "account created after tweet")
    return rec


def serialize(rec: TweetRecord) -> str:
    """One JSON line in the same field subset :func:`parse_record` reads."""
    obj = {
        "id_str": rec.tweet_id,
        "text": rec.text,
        "created_at": rec.created_at.isoformat(),
        "retweet_count": rec.retweet_count,
        "in_reply_to_status_id": True if rec.is_reply else None,
        "place": None if rec.place_full_name is None else {"full_name": rec.place_full_name},
        "user": {
            "screen_name": rec.user_screen_name,
            "created_at": rec.user_created_at.isoformat(),
            "followers_count": rec.followers,
            "friends_count": rec.followees,
            "statuses_count": rec.statuses_count,
        },
    }
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def dedup(records: Iterable[TweetRecord]) -> list[TweetRecord]:
    seen: set[str] = set()
    out = []
    for rec in records:
        if rec.tweet_id not in seen:
            seen.add(rec.tweet_id)
            out.append(rec)
    return out


def experience(rec: TweetRecord) -> int:
    """Whole UTC calendar days from account creation to the tweet."""
    return (rec.created_at.date() - rec.user_created_at.date()).days


def intensity(rec: TweetRecord) -> float:
    return rec.statuses_count / (experience(rec) + 1)


def user_features(rec: TweetRecord) -> UserFeatures:
    return UserFeatures(experience(rec), intensity(rec))


def in_window(rec: TweetRecord, window: tuple[date, date] | None) -> bool:
    if window is None:
        return True
    start, end = window
    return start <= rec.created_at.date() <= end


@dataclass
class IngestResult:
    records: list[TweetRecord] = field(default_factory=list)
    rejections: list[tuple[int, str]] = field(default_factory=list)
    duplicates: int = 0

    def summary(self) -> dict:
        by_reason: dict[str, int] = {}
        for _, reason in self.rejections:
            by_reason[reason] = by_reason.get(reason, 0) + 1
        return {
            "accepted": len(self.records),
            "rejected": len(self.rejections),
            "rejected_by_reason": dict(sorted(by_reason.items())),
            "duplicates": self.duplicates,
        }


def _parse_chunk(chunk: Sequence[tuple[int, str]]):
    out = []
    for lineno, line in chunk:
        try:
            out.append((lineno, parse_record(line)))
        except RejectedRecord as exc:
            out.append((lineno, exc))
    return out


def _chunks(lines: Iterable[str]) -> Iterator[list[tuple[int, str]]]:
    chunk = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        chunk.append((lineno, line))
        if len(chunk) == CHUNK:
            yield chunk
            chunk = []
    if chunk:
        yield chunk


def ingest(lines: Iterable[str], threads: int = 1) -> IngestResult:
    """Parse and dedup a stream of lines; line numbers count from 1 across the stream.

    Blank lines are skipped without being counted as rejections. Chunks are
    parsed concurrently but collected in input order, so the result does not
    depend on ``threads``.
    """
    result = IngestResult()
    parsed = []
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(_parse_chunk, _chunks(lines)):
                parsed.extend(part)
    else:
        for chunk in _chunks(lines):
            parsed.extend(_parse_chunk(chunk))

    seen: set[str] = set()
    for lineno, item in parsed:
        if isinstance(item, RejectedRecord):
            log.info("line %d rejected: %s", lineno, item)
            result.rejections.append((lineno, item.reason))
        elif item.tweet_id in seen:
            result.duplicates += 1
        else:
            seen.add(item.tweet_id)
            result.records.append(item)
    return result


def read_lines(paths) -> Iterator[str]:
    """Concatenate files in argument order."""
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            yield from fh


def load_corpus(path) -> list[TweetRecord]:
    """Read a normalized corpus written by ``geopulse ingest``."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(parse_record(line))
    return records
