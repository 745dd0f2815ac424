"""Lexicon polarity scoring in [-1, 1] and the emoticon pseudo-label check."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .resources import data_path, read_rows

POSITIVE = ":)"
NEGATIVE = ":("
WINDOW = 2

DEFAULT_EMOTICONS = frozenset({
    "<3", ">:D", ":-D", ":D", "=-D", "=D", "X-D", "x-D",
    ">:P", ":-P", ":P", ":-p", ":p", ":-b", ":c)", ":o)", ":^)",
    ">:)", ":-)", ":)", "=)", "=]", ":]", ":}", ":>", ":3",
    ">;]", ";-)", ";)", ";-]", ";]", ";D", ";^)",
    ">:o", ":-O", ":O", ":o", ":-o", "o_O", "o.O",
    ">:/", ":-/", ":/", ":\\", ">:\\", ":-s", ":S", ":-S",
    ">:[", ":-(", ":(", "=(", ":-[", ":[", ":{", ":-<", ":-c", "=/",
    ":'(", ":'''(", ";'(",
})

_URL = r"(?:https?://|www\.)\S+"
_MENTION = r"@\w+"
_HASHTAG = r"#(\w+)"
_WORD = r"[^\W_]+(?:'[^\W_]+)*|n't"

_tokenizers: dict[frozenset, re.Pattern] = {}


def _tokenizer(emoticons: frozenset) -> re.Pattern:
    rx = _tokenizers.get(emoticons)
    if rx is None:
        faces = "|".join(re.escape(e) for e in sorted(emoticons, key=lambda e: (-len(e), e)))
        # emoticons must not be glued to a following word character (":p" in ":paris")
        face_alt = rf"(?P<face>(?:{faces}))(?![^\W_])" if faces else r"(?P<face>(?!))"
        rx = re.compile(
            rf"(?P<url>{_URL})|(?P<mention>{_MENTION})|{face_alt}"
            rf"|#(?P<tag>\w+)|(?P<word>{_WORD})"
        )
        _tokenizers[emoticons] = rx
    return rx


def tokenize(text: str, emoticons: Iterable[str] = DEFAULT_EMOTICONS) -> list[str]:
    """Lowercased words; emoticons kept verbatim; URLs and @mentions dropped."""
    out = []
    for m in _tokenizer(frozenset(emoticons)).finditer(text or ""):
        kind = m.lastgroup
        if kind == "face":
            out.append(m.group("face"))
        elif kind == "tag":
            out.append(m.group("tag").lower())
        elif kind == "word":
            out.append(m.group("word").lower())
    return out


@dataclass(frozen=True)
class Lexicon:
    term_polarity: Mapping[str, float] = field(default_factory=dict)
    negators: frozenset[str] = frozenset()
    intensifiers: Mapping[str, float] = field(default_factory=dict)
    emoticon_polarity: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for table in (self.term_polarity, self.emoticon_polarity):
            for k, v in table.items():
                if not -1.0 <= v <= 1.0:
                    raise ValueError(f"polarity of {k!r} outside [-1, 1]: {v}")
        for k, v in self.intensifiers.items():
            if not v > 0:
                raise ValueError(f"intensifier {k!r} must be positive: {v}")

    @classmethod
    def from_csv(cls, path=None) -> "Lexicon":
        terms, negators, boost, faces = {}, set(), {}, {}
        for row in read_rows(path or data_path("lexicon.csv"), ("kind", "surface", "value")):
            kind, surface = row["kind"], row["surface"]
            if kind == "term":
                terms[surface.lower()] = float(row["value"])
            elif kind == "negator":
                negators.add(surface.lower())
            elif kind == "intensifier":
                boost[surface.lower()] = float(row["value"])
            elif kind == "emoticon":
                faces[surface] = float(row["value"])
            else:
                raise ValueError(f"unknown lexicon kind {kind!r}")
        return cls(terms, frozenset(negators), boost, faces)

    def mirrored(self) -> "Lexicon":
        """Same lexicon with every polarity negated."""
        return Lexicon(
            {k: -v for k, v in self.term_polarity.items()},
            self.negators,
            self.intensifiers,
            {k: -v for k, v in self.emoticon_polarity.items()},
        )

    @property
    def emoticons(self) -> frozenset[str]:
        return DEFAULT_EMOTICONS | frozenset(self.emoticon_polarity)


def score_tokens(tokens: list[str], l: Lexicon, use_emoticons: bool = True) -> float:
    hits = []
    for i, tok in enumerate(tokens):
        if tok in l.term_polarity:
            base = l.term_polarity[tok]
        elif use_emoticons and tok in l.emoticon_polarity:
            base = l.emoticon_polarity[tok]
        else:
            continue
        window = tokens[max(0, i - WINDOW) : i]
        mult = 1.0
        for w in window:
            mult *= l.intensifiers.get(w, 1.0)
        if any(w in l.negators for w in window):
            mult = -mult
        hits.append(base * mult)
    if not hits:
        return 0.0
    return max(-1.0, min(1.0, math.fsum(hits) / len(hits)))


def score_polarity(text: str, l: Lexicon) -> float:
    return score_tokens(tokenize(text, l.emoticons), l)


@dataclass(frozen=True)
class ValidationMetrics:
    n: int
    accuracy: float
    sensitivity: float
    specificity: float
    n_positive: int = 0
    n_negative: int = 0
    n_mixed: int = 0


def label(text: str) -> str | None:
    """"pos" / "neg" for the two reference smileys, "mixed" for both, else None."""
    toks = set(tokenize(text))
    pos, neg = POSITIVE in toks, NEGATIVE in toks
    if pos and neg:
        return "mixed"
    return "pos" if pos else "neg" if neg else None


def _text(rec) -> str:
    return rec if isinstance(rec, str) else rec.text


def validate_emoticons(
    records: Iterable,
    l: Lexicon,
    scorer: Callable[[str], float] | None = None,
) -> ValidationMetrics:
    """Lenient smiley test: ":)" is correct at polarity >= 0, ":(" at <= 0.

    Scoring sees the text with every emoticon token removed and ignores the
    lexicon's emoticon table, so the label never feeds the score. ``scorer``
    replaces the lexicon scorer (it receives the cleaned text). Records may be
    TweetRecords or plain strings. A class with no records reports NaN.
    """
    if scorer is None:
        def scorer(clean):
            return score_tokens(tokenize(clean), l, use_emoticons=False)

    tp = tn = n_pos = n_neg = mixed = 0
    for rec in records:
        text = _text(rec)
        lab = label(text)
        if lab is None:
            continue
        if lab == "mixed":
            mixed += 1
            continue
        clean = " ".join(t for t in tokenize(text) if t not in DEFAULT_EMOTICONS)
        score = scorer(clean)
        if lab == "pos":
            n_pos += 1
            tp += score >= 0
        else:
            n_neg += 1
            tn += score <= 0
    n = n_pos + n_neg
    if n == 0:
        raise ValueError("no labeled records")
    return ValidationMetrics(
        n=n,
        accuracy=(tp + tn) / n,
        sensitivity=tp / n_pos if n_pos else math.nan,
        specificity=tn / n_neg if n_neg else math.nan,
        n_positive=n_pos,
        n_negative=n_neg,
        n_mixed=mixed,
    )
