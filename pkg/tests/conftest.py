import json
from datetime import date

import pytest

from geopulse.pipeline import AttributedTweet, Resources


def raw_tweet(**over):
    """A well-formed raw tweet object; dotted keys override nested fields."""
    obj = {
        "id_str": "1",
        "text": "China trade talks good",
        "created_at": "Sun Mar 29 10:00:00 +0000 2015",
        "retweet_count": 0,
        "in_reply_to_status_id": None,
        "place": {"full_name": "Los Angeles, CA"},
        "user": {
            "screen_name": "bob",
            "created_at": "Tue Mar 10 09:00:00 +0000 2015",
            "followers_count": 10,
            "friends_count": 5,
            "statuses_count": 40,
        },
    }
    for key, value in over.items():
        parts = key.split(".")
        cur = obj
        for p in parts[:-1]:
            cur = cur[p]
        if value is ...:
            del cur[parts[-1]]
        else:
            cur[parts[-1]] = value
    return obj


def raw_line(**over) -> str:
    return json.dumps(raw_tweet(**over))


def tweet(polarity=0.0, states=("CA",), provinces=(), day=date(2015, 5, 16), user="u",
          tweet_id="t", **kw):
    fields = dict(chinese=0.0, followers=1.0, followees=1.0, retweet_count=0.0, reply=0.0,
                  experience=10.0, intensity=1.0)
    fields.update(kw)
    return AttributedTweet(tweet_id=tweet_id, user=user, date=day, states=frozenset(states),
                           provinces=frozenset(provinces), polarity=polarity, **fields)


@pytest.fixture(scope="session")
def resources():
    return Resources.load()


_ACCEPTANCE: dict[str, tuple[str, str]] = {}


@pytest.fixture
def criterion(request):
    """Record a named acceptance criterion's outcome for the terminal summary."""
    def start(key, title):
        request.node._criterion = (key, title)
    return start


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    key = getattr(item, "_criterion", None)
    if key and rep.when == "call":
        _ACCEPTANCE[key[0]] = ("PASS" if rep.passed else "FAIL", key[1])


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: int(k[1:])):
        status, title = _ACCEPTANCE[key]
        terminalreporter.write_line(f"{key} {status}  {title}")
