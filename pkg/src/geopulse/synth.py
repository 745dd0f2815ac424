"""Seeded synthetic corpora for tests, demos and the bundled sample."""

from __future__ import annotations

import json
import math
from datetime import date, datetime, timedelta, timezone

import numpy as np

from .geo import PROVINCE_IDS, STATE_IDS
from .pipeline import AttributedTweet

_STATE_NAMES = {
    "AL": "Alabama", "AK": "Alaska", "AZ": "Arizona", "AR": "Arkansas", "CA": "California",
    "CO": "Colorado", "CT": "Connecticut", "DE": "Delaware", "DC": "District of Columbia",
    "FL": "Florida", "GA": "Georgia", "HI": "Hawaii", "ID": "Idaho", "IL": "Illinois",
    "IN": "Indiana", "IA": "Iowa", "KS": "Kansas", "KY": "Kentucky", "LA": "Louisiana",
    "ME": "Maine", "MD": "Maryland", "MA": "Massachusetts", "MI": "Michigan",
    "MN": "Minnesota", "MS": "Mississippi", "MO": "Missouri", "MT": "Montana",
    "NE": "Nebraska", "NV": "Nevada", "NH": "New Hampshire", "NJ": "New Jersey",
    "NM": "New Mexico", "NY": "New York", "NC": "North Carolina", "ND": "North Dakota",
    "OH": "Ohio", "OK": "Oklahoma", "OR": "Oregon", "PA": "Pennsylvania",
    "RI": "Rhode Island", "SC": "South Carolina", "SD": "South Dakota", "TN": "Tennessee",
    "TX": "Texas", "UT": "Utah", "VT": "Vermont", "VA": "Virginia", "WA": "Washington",
    "WV": "West Virginia", "WI": "Wisconsin", "WY": "Wyoming",
}
# full names that contain or equal another state's name would multi-attribute
_SAFE_FULL = sorted(
    s for s, name in _STATE_NAMES.items()
    if not any(o != s and (o_name in name or name in o_name) for o, o_name in _STATE_NAMES.items())
)
_CITIES = ["Springfield", "Riverside", "Franklin", "Greenville", "Fairview", "Salem",
           "Madison", "Clinton", "Georgetown", "Arlington", "Ashland", "Dover"]
_FOREIGN = ["London, England", "Toronto, Ontario", "Sydney, New South Wales", "Paris, France"]
# handles built from these never contain a listed surname as a segment
_PLAIN_NAMES = ["john", "smith", "kate", "miller", "bob", "jones", "alice", "brown",
                "carlos", "rivera", "emma", "davis", "noah", "taylor", "olivia", "moore",
                "lucas", "clark", "mia", "lewis", "ethan", "walker", "ava", "hall"]
_PLANTED = ["wang", "zhang", "chen", "liu", "huang", "zhao", "zhou", "lin", "yang", "xu"]

POSITIVE_WORDS = ["good", "great", "happy", "nice", "wonderful", "beautiful"]
NEGATIVE_WORDS = ["bad", "terrible", "sad", "awful", "horrible", "ugly"]
_FILLER = ["news", "today", "trade", "talks", "report", "policy", "market", "visit"]

TWITTER_TIME = "%a %b %d %H:%M:%S +0000 %Y"
WINDOW_START = date(2015, 5, 16)


def plain_handle(rng) -> str:
    a, b = rng.choice(_PLAIN_NAMES, size=2, replace=False)
    style = rng.integers(3)
    if style == 0:
        return f"{a}_{b}{rng.integers(10, 99)}"
    if style == 1:
        return f"{a.capitalize()}{b.capitalize()}"
    return f"{a}{rng.integers(100, 999)}"


def planted_handle(rng) -> str:
    s = rng.choice(_PLANTED)
    first = rng.choice(_PLAIN_NAMES)
    style = rng.integers(3)
    if style == 0:
        return f"{first}_{s}{rng.integers(10, 99)}"
    if style == 1:
        return f"{s}_{first}"
    return f"{s.capitalize()}{rng.integers(1, 999)}"


def handles(n: int, chinese_rate: float, seed: int = 0) -> tuple[list[str], int]:
    """``n`` distinct handles, exactly round(n * chinese_rate) carrying a clean surname segment."""
    rng = np.random.default_rng(seed)
    k = int(round(n * chinese_rate))
    out, seen = [], set()
    while len(out) < n:
        h = planted_handle(rng) if len(out) < k else plain_handle(rng)
        if h not in seen:
            seen.add(h)
            out.append(h)
    order = rng.permutation(n)
    return [out[i] for i in order], k


def _place(rng, state: str) -> str:
    if state in _SAFE_FULL and rng.random() < 0.3:
        return f"{rng.choice(_CITIES)}, {_STATE_NAMES[state]}"
    return f"{rng.choice(_CITIES)}, {state}"


def raw_tweets(n: int = 200, seed: int = 0, *, n_users: int | None = None, n_days: int = 10,
               start: date = WINDOW_START, chinese_rate: float = 0.1,
               province_rate: float = 0.3, emoticon_rate: float = 0.15,
               unlocated_rate: float = 0.05, multi_rate: float = 0.03,
               intensity_effect: float = 0.0,
               states: tuple[str, ...] = STATE_IDS) -> list[str]:
    """Raw Twitter-style JSON lines.

    Each tweet carries one sentiment word (occasionally negated); the chance it
    is positive rises with the author's standardized log-intensity when
    ``intensity_effect`` > 0. A ``multi_rate`` share of places is
    "Kansas City, MO", which attributes to both KS and MO.
    """
    rng = np.random.default_rng(seed)
    n_users = n_users or max(1, n // 3)
    names, _ = handles(n_users, chinese_rate, seed=seed + 1)
    home = rng.choice(states, size=n_users)
    age_days = rng.integers(0, 3000, size=n_users)
    rate = np.exp(rng.normal(1.0, 1.0, size=n_users))
    followers = rng.integers(0, 50000, size=n_users)
    followees = rng.integers(0, 3000, size=n_users)
    z_rate = (np.log(rate) - 1.0)

    lines = []
    for i in range(n):
        u = int(rng.integers(n_users))
        day = start + timedelta(days=int(rng.integers(n_days)))
        posted = datetime(day.year, day.month, day.day, tzinfo=timezone.utc) + timedelta(
            seconds=int(rng.integers(86400)))
        created = posted - timedelta(days=int(age_days[u]), seconds=int(rng.integers(3600)))
        exp_days = (posted.date() - created.date()).days
        statuses = int(round(rate[u] * (exp_days + 1)))

        p_pos = 1.0 / (1.0 + math.exp(-intensity_effect * z_rate[u]))
        positive = rng.random() < p_pos
        word = rng.choice(POSITIVE_WORDS if positive else NEGATIVE_WORDS)
        if rng.random() < 0.1:
            word = f"not {word}"
        parts = ["China", str(rng.choice(_FILLER)), str(word)]
        if rng.random() < province_rate:
            k = 1 + int(rng.random() < 0.2)
            parts += list(rng.choice(PROVINCE_IDS, size=k, replace=False))
        if rng.random() < 0.2:
            parts.append("http://t.co/x" + str(rng.integers(1000)))
        if rng.random() < 0.1:
            parts.insert(0, "@" + str(rng.choice(_PLAIN_NAMES)))
        if rng.random() < emoticon_rate:
            parts.append(":)" if positive else ":(")

        r = rng.random()
        if r < unlocated_rate:
            place = None if rng.random() < 0.5 else {"full_name": str(rng.choice(_FOREIGN))}
        elif r < unlocated_rate + multi_rate:
            place = {"full_name": "Kansas City, MO"}
        else:
            place = {"full_name": _place(rng, str(home[u]))}

        obj = {
            "id_str": str(600000000000000000 + seed * 1000003 + i),
            "text": " ".join(parts),
            "created_at": posted.strftime(TWITTER_TIME),
            "retweet_count": int(rng.poisson(2)),
            "in_reply_to_status_id": int(rng.integers(10**17)) if rng.random() < 0.2 else None,
            "place": place,
            "user": {
                "screen_name": names[u],
                "created_at": created.strftime(TWITTER_TIME),
                "followers_count": int(followers[u]),
                "friends_count": int(followees[u]),
                "statuses_count": statuses,
            },
        }
        lines.append(json.dumps(obj, sort_keys=True))
    return lines


def planted_panel(n: int = 2000, seed: int = 0, *, n_states: int = 10, n_dates: int = 8,
                  noise: float = 0.2, multiple: float = 10.0, intensity_scale: float = 5.0,
                  chinese_rate: float = 0.05):
    """Attributed rows whose intensity slope is ``multiple`` times its theoretical SE.

    Intensity is exponential with scale ``intensity_scale`` (so its sd equals the
    scale) and independent of every other regressor and fixed effect; the SE of
    its OLS slope is then noise / (scale * sqrt(n)). Returns (tweets, slope).
    """
    rng = np.random.default_rng(seed)
    states = STATE_IDS[:n_states]
    dates = [WINDOW_START + timedelta(days=d) for d in range(n_dates)]
    slope = multiple * noise / (intensity_scale * math.sqrt(n))
    state_fx = dict(zip(states, rng.normal(0, 0.05, n_states)))
    date_fx = dict(zip(dates, rng.normal(0, 0.05, n_dates)))
    out = []
    for i in range(n):
        s = states[int(rng.integers(n_states))]
        d = dates[int(rng.integers(n_dates))]
        inten = float(rng.exponential(intensity_scale))
        inten_c = inten - intensity_scale
        y = state_fx[s] + date_fx[d] + slope * inten_c + rng.normal(0, noise)
        out.append(AttributedTweet(
            tweet_id=str(i), user=f"u{i}", date=d, states=frozenset([s]),
            provinces=frozenset(), polarity=float(np.clip(y, -1.0, 1.0)),
            chinese=float(rng.random() < chinese_rate),
            followers=float(rng.integers(0, 10000)), followees=float(rng.integers(0, 2000)),
            retweet_count=float(rng.poisson(2)), reply=float(rng.random() < 0.2),
            experience=float(rng.integers(0, 3000)), intensity=inten,
        ))
    return out, slope
