"""State-level aggregates: counts, friendliness/variance, the State-Province
matrix, the daily national series and the external-index correlation.

All sums go through ``math.fsum`` so every aggregate is exactly independent of
input order (and therefore of how work was split across threads).
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from datetime import date
from typing import Iterable, Mapping, Sequence

import numpy as np

from .geo import PROVINCE_IDS, STATE_IDS
from .pipeline import AttributedTweet

POPULATION = "population"
SAMPLE = "sample"
TIE_PREFERENCE = "Beijing"


class KeyMismatch(ValueError):
    pass


def _mean(xs: Sequence[float]) -> float:
    return math.fsum(xs) / len(xs)


def _variance(xs: Sequence[float], mode: str = POPULATION) -> float:
    n = len(xs)
    if mode not in (POPULATION, SAMPLE):
        raise ValueError(f"unknown variance mode {mode!r}")
    if n <= 1:
        return 0.0
    m = _mean(xs)
    denom = n if mode == POPULATION else n - 1
    return math.fsum((x - m) ** 2 for x in xs) / denom


@dataclass(frozen=True)
class CountSummary:
    mean: float
    std: float
    min: int
    max: int
    N: int


def state_counts(attributed: Iterable[AttributedTweet], states: Sequence[str] = STATE_IDS):
    """Per-state tweet counts over every state (zeros included) plus a summary.

    A tweet attributed to k states adds one to each of them. The summary's std
    is the sample standard deviation across states.
    """
    counts = {s: 0 for s in states}
    for tw in attributed:
        for s in tw.states:
            if s in counts:
                counts[s] += 1
    values = [float(v) for v in counts.values()]
    summary = CountSummary(
        mean=_mean(values),
        std=math.sqrt(_variance(values, SAMPLE)) if len(values) > 1 else 0.0,
        min=min(counts.values()),
        max=max(counts.values()),
        N=len(values),
    )
    return counts, summary


@dataclass(frozen=True)
class StateStats:
    state: str
    n: int
    friendliness: float
    variance: float


def _by_state(attributed: Iterable[AttributedTweet]) -> dict[str, list[float]]:
    groups: dict[str, list[float]] = defaultdict(list)
    for tw in attributed:
        for s in tw.states:
            groups[s].append(tw.polarity)
    return groups


def friendliness_variance(attributed: Iterable[AttributedTweet],
                          variance: str = POPULATION) -> list[StateStats]:
    """Mean and variance of polarity for every state with at least one tweet."""
    groups = _by_state(attributed)
    out = []
    for s in sorted(groups):
        pol = groups[s]
        out.append(StateStats(s, len(pol), _mean(pol), _variance(pol, variance)))
    return out


@dataclass(frozen=True)
class Ranked:
    rank: int
    stats: StateStats
    tied: bool


def rank_states(stats: Sequence[StateStats], by: str, descending: bool) -> list[Ranked]:
    """Order by ``by``; equal values keep StateId order and are flagged as tied."""
    sign = -1.0 if descending else 1.0
    order = sorted(stats, key=lambda st: (sign * getattr(st, by), st.state))
    out = []
    for i, st in enumerate(order):
        v = getattr(st, by)
        tied = (i > 0 and getattr(order[i - 1], by) == v) or (
            i + 1 < len(order) and getattr(order[i + 1], by) == v
        )
        out.append(Ranked(i + 1, st, tied))
    return out


@dataclass
class StateProvinceMatrix:
    states: tuple[str, ...]
    provinces: tuple[str, ...]
    counts: np.ndarray
    values: np.ndarray
    row_counts: np.ndarray

    @property
    def zero_rows(self) -> list[str]:
        return [s for s, c in zip(self.states, self.row_counts) if c == 0]

    def row(self, state: str) -> dict[str, float]:
        i = self.states.index(state)
        return dict(zip(self.provinces, self.values[i].tolist()))

    def top_province(self, state: str) -> str | None:
        """Largest share; a tie involving Beijing goes to Beijing, else alphabetical."""
        i = self.states.index(state)
        if self.row_counts[i] == 0:
            return None
        counts = self.counts[i]
        best = counts.max()
        tied = [p for p, c in zip(self.provinces, counts) if c == best]
        return TIE_PREFERENCE if TIE_PREFERENCE in tied else tied[0]


def build_matrix(attributed: Iterable[AttributedTweet], states: Sequence[str] = STATE_IDS,
                 provinces: Sequence[str] = PROVINCE_IDS) -> StateProvinceMatrix:
    """Count every (state, province) pair of each tweet, then row-normalize.

    Only tweets with at least one state and one province contribute; rows that
    receive nothing stay all-zero.
    """
    s_idx = {s: i for i, s in enumerate(states)}
    p_idx = {p: j for j, p in enumerate(provinces)}
    counts = np.zeros((len(states), len(provinces)))
    row_counts = np.zeros(len(states), dtype=np.int64)
    for tw in attributed:
        rows = [s_idx[s] for s in tw.states if s in s_idx]
        cols = [p_idx[p] for p in tw.provinces if p in p_idx]
        if not rows or not cols:
            continue
        for i in rows:
            row_counts[i] += 1
            for j in cols:
                counts[i, j] += 1.0
    totals = counts.sum(axis=1, keepdims=True)
    values = np.divide(counts, totals, out=np.zeros_like(counts), where=totals > 0)
    return StateProvinceMatrix(tuple(states), tuple(provinces), counts, values, row_counts)


@dataclass(frozen=True)
class DailyPoint:
    date: date
    mean_polarity: float
    n: int


def daily_series(attributed: Iterable[AttributedTweet]) -> list[DailyPoint]:
    groups: dict[date, list[float]] = defaultdict(list)
    for tw in attributed:
        groups[tw.date].append(tw.polarity)
    return [DailyPoint(d, _mean(groups[d]), len(groups[d])) for d in sorted(groups)]


@dataclass(frozen=True)
class CorrelationReport:
    r: float
    beta: float
    beta_se: float
    intercept: float
    n: int


def log_counts(counts: Mapping[str, float]) -> dict[str, float]:
    """Natural log; a zero count maps to log(0 + 1) = 0."""
    return {s: math.log(c) if c >= 1 else math.log(c + 1) for s, c in counts.items()}


def simple_ols(x: Sequence[float], y: Sequence[float]) -> CorrelationReport:
    """Pearson r plus slope, slope SE and intercept of y on x."""
    n = len(x)
    if n != len(y) or n < 2:
        raise ValueError("need at least two paired observations")
    mx, my = _mean(x), _mean(y)
    dx = [a - mx for a in x]
    dy = [b - my for b in y]
    sxx = math.fsum(a * a for a in dx)
    syy = math.fsum(b * b for b in dy)
    sxy = math.fsum(a * b for a, b in zip(dx, dy))
    if sxx == 0:
        raise ValueError("x is constant")
    beta = sxy / sxx
    intercept = my - beta * mx
    r = sxy / math.sqrt(sxx * syy) if syy > 0 else math.nan
    if n >= 3:
        rss = math.fsum((b - beta * a) ** 2 for a, b in zip(dx, dy))
        beta_se = math.sqrt(rss / (n - 2) / sxx)
    else:
        beta_se = math.nan
    if not math.isnan(r):
        r = max(-1.0, min(1.0, r))
    return CorrelationReport(r, beta, beta_se, intercept, n)


def correlate_external(counts: Mapping[str, float],
                       external: Mapping[str, float]) -> CorrelationReport:
    """Correlate log tweet counts (y) with an external index used as-is (x)."""
    if set(counts) != set(external):
        raise KeyMismatch("key mismatch")
    keys = sorted(counts)
    y = log_counts(counts)
    return simple_ols([float(external[k]) for k in keys], [y[k] for k in keys])
