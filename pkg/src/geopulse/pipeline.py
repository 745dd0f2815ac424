"""Turning TweetRecords into AttributedTweets with all per-tweet features."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import corpus, ethnic
from .corpus import TweetRecord
from .ethnic import SurnameList
from .geo import ProvinceGazetteer, StateGazetteer, StopList
from .sentiment import Lexicon, score_polarity

CHUNK = 512


@dataclass(frozen=True)
class AttributedTweet:
    tweet_id: str
    user: str
    date: date
    states: frozenset[str]
    provinces: frozenset[str]
    polarity: float
    chinese: float
    followers: float
    followees: float
    retweet_count: float
    reply: float
    experience: float
    intensity: float
    n_tweets: int = 1


@dataclass(frozen=True)
class Resources:
    states: StateGazetteer
    provinces: ProvinceGazetteer
    stoplist: StopList
    lexicon: Lexicon
    surnames: SurnameList
    surname_mode: str = ethnic.SEGMENT

    @classmethod
    def load(cls, states=None, provinces=None, stoplist=None, lexicon=None,
             surnames=None, surname_mode=ethnic.SEGMENT) -> "Resources":
        return cls(
            StateGazetteer.from_csv(states),
            ProvinceGazetteer.from_csv(provinces),
            StopList.from_csv(stoplist),
            Lexicon.from_csv(lexicon),
            SurnameList.from_file(surnames),
            surname_mode,
        )


def attribute(rec: TweetRecord, res: Resources) -> AttributedTweet | None:
    """None when the stoplist rejects the tweet or no state is identified."""
    if not res.stoplist.passes(rec.text):
        return None
    states = res.states.attribute(rec.place_full_name)
    if not states:
        return None
    return AttributedTweet(
        tweet_id=rec.tweet_id,
        user=rec.user_screen_name,
        date=rec.created_at.date(),
        states=states,
        provinces=res.provinces.attribute(rec.text),
        polarity=score_polarity(rec.text, res.lexicon),
        chinese=float(ethnic.is_chinese(rec.user_screen_name, res.surnames, res.surname_mode)),
        followers=float(rec.followers),
        followees=float(rec.followees),
        retweet_count=float(rec.retweet_count),
        reply=float(rec.is_reply),
        experience=float(corpus.experience(rec)),
        intensity=corpus.intensity(rec),
    )


def _attribute_chunk(args):
    chunk, res = args
    return [attribute(r, res) for r in chunk]


@dataclass
class Attribution:
    tweets: list[AttributedTweet] = field(default_factory=list)
    stopped: int = 0
    unlocated: int = 0


def attribute_all(records: Sequence[TweetRecord], res: Resources, threads: int = 1,
                  chunk: int | None = None) -> Attribution:
    """Order-preserving parallel map of :func:`attribute`."""
    chunk = chunk or CHUNK
    chunks = [records[i : i + chunk] for i in range(0, len(records), chunk)]
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_attribute_chunk, [(c, res) for c in chunks]))
    else:
        parts = [_attribute_chunk((c, res)) for c in chunks]

    out = Attribution()
    for recs, part in zip(chunks, parts):
        for rec, tw in zip(recs, part):
            if tw is not None:
                out.tweets.append(tw)
            elif not res.stoplist.passes(rec.text):
                out.stopped += 1
            else:
                out.unlocated += 1
    return out


def filter_window(records: Iterable[TweetRecord], window) -> list[TweetRecord]:
    return [r for r in records if corpus.in_window(r, window)]
