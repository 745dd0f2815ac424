"""Fixed-effects OLS on tweet polarity and joint F-tests on dummy families.

The model regresses polarity on followers, followees, retweets, reply,
experience, intensity and the Chinese-surname flag, with optional state and
date dummy families (one level dropped as reference). Coefficients come from a
column-pivoted Householder QR of the column-equilibrated design, refined once
against an exactly accumulated residual; standard errors are the classical
homoskedastic ones.
"""

from __future__ import annotations

import logging
import math
from collections import OrderedDict
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.linalg
from scipy.special import betainc

from .pipeline import AttributedTweet

log = logging.getLogger(__name__)

CONTINUOUS = ("followers", "followees", "retweet", "experience", "intensity")
BINARY = ("reply", "chinese")
REGRESSORS = ("followers", "followees", "retweet", "reply", "experience", "intensity", "chinese")
INTERCEPT = "constant"
STATE = "state"
DATE = "date"

ALL, CHINESE_ONLY, NON_CHINESE = "all", "chinese_only", "non_chinese"
PER_TWEET, PER_USER_DAY = "per_tweet", "per_user_day"
EXPAND, FIRST_STATE = "expand", "first"

_FIELD = {"retweet": "retweet_count"}

# rank test on the equilibrated design
RANK_TOL = 1e-10
NESTING_TOL = 1e-10


class EstimationError(ValueError):
    pass


class SingularDesign(EstimationError):
    def __init__(self, columns):
        self.columns = list(columns)
        super().__init__(f"singular design: {', '.join(self.columns)}")


@dataclass(frozen=True)
class RegressionSpec:
    state_effects: bool = False
    date_effects: bool = False
    subset: str = ALL
    aggregation: str = PER_TWEET
    regressors: tuple[str, ...] = REGRESSORS
    multi_state: str = EXPAND

    @property
    def active_regressors(self) -> tuple[str, ...]:
        if self.subset != ALL:
            return tuple(r for r in self.regressors if r != "chinese")
        return self.regressors


@dataclass
class DesignMatrix:
    X: np.ndarray
    y: np.ndarray
    labels: list[str]
    references: dict[str, str] = field(default_factory=dict)
    families: dict[str, list[str]] = field(default_factory=dict)
    dropped: dict[str, str] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def k(self) -> int:
        return self.X.shape[1]

    def without(self, names: Iterable[str]) -> "DesignMatrix":
        """The same rows with the given columns removed."""
        drop = set(names)
        keep = [i for i, lab in enumerate(self.labels) if lab not in drop]
        fams = {f: [c for c in cols if c not in drop] for f, cols in self.families.items()}
        return DesignMatrix(
            self.X[:, keep], self.y, [self.labels[i] for i in keep],
            dict(self.references), {f: c for f, c in fams.items() if c}, dict(self.dropped),
        )


@dataclass
class RegressionResult:
    labels: list[str]
    coef: np.ndarray
    se: np.ndarray
    t: np.ndarray
    p: np.ndarray
    n: int
    k: int
    rss: float
    tss: float
    r2: float
    adj_r2: float
    residuals: np.ndarray
    fitted: np.ndarray

    def __getitem__(self, label: str) -> float:
        return float(self.coef[self.labels.index(label)])

    def term(self, label: str) -> dict[str, float]:
        i = self.labels.index(label)
        return {"coef": float(self.coef[i]), "se": float(self.se[i]),
                "t": float(self.t[i]), "p": float(self.p[i])}

    @property
    def df_resid(self) -> int:
        return self.n - self.k


@dataclass(frozen=True)
class FTestResult:
    F: float
    df1: int
    df2: int
    p_value: float


def aggregate_user_day(attributed: Iterable[AttributedTweet]) -> list[AttributedTweet]:
    """Average each (user, UTC date) group into one record, first-seen order.

    Numeric features are group means (reply becomes the reply fraction); the
    state and province sets are unions over the group.
    """
    groups: OrderedDict[tuple, list[AttributedTweet]] = OrderedDict()
    for tw in attributed:
        groups.setdefault((tw.user, tw.date), []).append(tw)

    def mean(xs):
        return math.fsum(xs) / len(xs)

    out = []
    for (user, day), tws in groups.items():
        out.append(AttributedTweet(
            tweet_id=f"{user}@{day.isoformat()}",
            user=user,
            date=day,
            states=frozenset().union(*(t.states for t in tws)),
            provinces=frozenset().union(*(t.provinces for t in tws)),
            polarity=mean([t.polarity for t in tws]),
            chinese=mean([t.chinese for t in tws]),
            followers=mean([t.followers for t in tws]),
            followees=mean([t.followees for t in tws]),
            retweet_count=mean([t.retweet_count for t in tws]),
            reply=mean([t.reply for t in tws]),
            experience=mean([t.experience for t in tws]),
            intensity=mean([t.intensity for t in tws]),
            n_tweets=sum(t.n_tweets for t in tws),
        ))
    return out


def select_rows(attributed: Iterable[AttributedTweet], spec: RegressionSpec):
    """Apply subset, aggregation and multi-state handling -> (tweet, state) rows."""
    tws = list(attributed)
    if spec.subset == CHINESE_ONLY:
        tws = [t for t in tws if t.chinese > 0]
    elif spec.subset == NON_CHINESE:
        tws = [t for t in tws if t.chinese == 0]
    elif spec.subset != ALL:
        raise ValueError(f"unknown subset {spec.subset!r}")
    if spec.aggregation == PER_USER_DAY:
        tws = aggregate_user_day(tws)
    elif spec.aggregation != PER_TWEET:
        raise ValueError(f"unknown aggregation {spec.aggregation!r}")

    rows = []
    for t in tws:
        states = sorted(t.states)
        if not states:
            continue
        if spec.multi_state == FIRST_STATE:
            states = states[:1]
        elif spec.multi_state != EXPAND:
            raise ValueError(f"unknown multi-state mode {spec.multi_state!r}")
        rows.extend((t, s) for s in states)
    return rows


def _dummies(levels: Sequence[str], family: str, reference: str | None):
    observed = sorted(set(levels))
    ref = observed[0] if reference is None else reference
    if ref not in observed:
        raise ValueError(f"reference level {ref!r} not observed in {family}")
    kept = [lv for lv in observed if lv != ref]
    idx = {lv: j for j, lv in enumerate(kept)}
    D = np.zeros((len(levels), len(kept)))
    for i, lv in enumerate(levels):
        j = idx.get(lv)
        if j is not None:
            D[i, j] = 1.0
    return D, [f"{family}[{lv}]" for lv in kept], ref


def build_design(records: Iterable[AttributedTweet], spec: RegressionSpec,
                 references: Mapping[str, str] | None = None) -> DesignMatrix:
    """Intercept, regressors and dummy families for the rows ``spec`` selects.

    The lexicographically first observed level of each family is the dropped
    reference unless ``references`` names another. Constant regressors and
    single-level families are dropped with a warning and listed in ``dropped``.
    """
    references = dict(references or {})
    rows = select_rows(records, spec)
    if not rows:
        raise EstimationError("no rows")
    n = len(rows)
    y = np.array([t.polarity for t, _ in rows], dtype=float)
    cols = [np.ones(n)]
    labels = [INTERCEPT]
    dropped: dict[str, str] = {}
    if spec.subset != ALL and "chinese" in spec.regressors:
        dropped["chinese"] = "constant within subset"

    for name in spec.active_regressors:
        v = np.array([getattr(t, _FIELD.get(name, name)) for t, _ in rows], dtype=float)
        if np.all(v == v[0]):
            log.warning("dropping constant column %s", name)
            dropped[name] = "constant"
            continue
        cols.append(v)
        labels.append(name)

    X = np.column_stack(cols)
    families: dict[str, list[str]] = {}
    refs: dict[str, str] = {}
    for family, on, levels in (
        (STATE, spec.state_effects, [s for _, s in rows]),
        (DATE, spec.date_effects, [t.date.isoformat() for t, _ in rows]),
    ):
        if not on:
            continue
        if len(set(levels)) < 2:
            log.warning("dropping %s effects: single level", family)
            dropped[family] = "single level"
            continue
        D, names, ref = _dummies(levels, family, references.get(family))
        X = np.column_stack([X, D])
        labels.extend(names)
        families[family] = names
        refs[family] = ref

    if n <= X.shape[1]:
        raise EstimationError(f"underdetermined: n={n} <= k={X.shape[1]}")
    return DesignMatrix(X, y, labels, refs, families, dropped)


def t_pvalue(t: float, df: int) -> float:
    """Two-sided Student-t tail probability."""
    if not math.isfinite(t):
        return math.nan
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def f_pvalue(F: float, df1: int, df2: int) -> float:
    """Upper tail of the F distribution via the regularized incomplete beta."""
    if F <= 0:
        return 1.0
    return float(betainc(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * F)))


_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _two_prod(a, b):
    p = a * b
    ca, cb = _SPLITTER * a, _SPLITTER * b
    ah, bh = ca - (ca - a), cb - (cb - b)
    al, bl = a - ah, b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _residual_dot2(X: np.ndarray, z: np.ndarray, y: np.ndarray) -> np.ndarray:
    """y - X @ z accumulated as if in twice float64 precision (portable, no long double)."""
    s = y.astype(float, copy=True)
    c = np.zeros_like(s)
    for j in range(X.shape[1]):
        p, e1 = _two_prod(X[:, j], -z[j])
        s, e2 = _two_sum(s, p)
        c += e1 + e2
    return s + c


def _gradient_exact(X: np.ndarray, r: np.ndarray) -> np.ndarray:
    """X.T @ r with every entry correctly rounded."""
    out = np.empty(X.shape[1])
    for j in range(X.shape[1]):
        p, e = _two_prod(X[:, j], r)
        out[j] = math.fsum(p.tolist() + e.tolist())
    return out


def ols_fit(d: DesignMatrix) -> RegressionResult:
    X, y = d.X, d.y
    n, k = X.shape
    if n <= k:
        raise EstimationError(f"underdetermined: n={n} <= k={k}")
    norms = np.sqrt(np.einsum("ij,ij->j", X, X))
    zero = norms == 0
    if zero.any():
        raise SingularDesign([lab for lab, z in zip(d.labels, zero) if z])
    Xs = X / norms
    Q, R, piv = scipy.linalg.qr(Xs, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > RANK_TOL * diag[0]))
    if rank < k:
        raise SingularDesign([d.labels[i] for i in sorted(piv[rank:])])

    qty = Q.T @ y
    z = scipy.linalg.solve_triangular(R, qty)
    # one corrected-seminormal step on a doubled-precision residual
    Xp = Xs[:, piv]
    g = _gradient_exact(Xp, _residual_dot2(Xp, z, y))
    z = z + scipy.linalg.solve_triangular(R, scipy.linalg.solve_triangular(R, g, trans="T"))
    Rinv = scipy.linalg.solve_triangular(R, np.eye(k))
    var_p = np.einsum("ij,ij->i", Rinv, Rinv)

    coef = np.empty(k)
    coef[piv] = z / norms[piv]
    unscaled = np.empty(k)
    unscaled[piv] = var_p / norms[piv] ** 2

    fitted = X @ coef
    resid = y - fitted
    rss = math.fsum(resid * resid)
    dof = n - k
    sigma2 = rss / dof
    se = np.sqrt(sigma2 * unscaled)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se > 0, coef / se, np.nan)
    p = np.array([t_pvalue(float(v), dof) for v in t])

    ybar = math.fsum(y) / n
    tss = math.fsum((y - ybar) ** 2)
    r2 = 1.0 - rss / tss if tss > 0 else math.nan
    adj = 1.0 - (1.0 - r2) * (n - 1) / (n - k) if tss > 0 else math.nan
    return RegressionResult(list(d.labels), coef, se, t, p, n, k, rss, tss, r2, adj, resid, fitted)


def joint_f_test(full: RegressionResult, restricted: RegressionResult) -> FTestResult:
    """F for the restriction of ``full`` down to ``restricted``'s columns.

    With no restricted columns (q = 0) the statistic is 0 with p = 1.
    """
    if full.n != restricted.n:
        raise EstimationError("nesting violated: different row counts")
    if not set(restricted.labels) <= set(full.labels):
        raise EstimationError("nesting violated: restricted columns not a subset")
    diff = restricted.rss - full.rss
    if diff < -NESTING_TOL * max(1.0, full.rss):
        raise EstimationError("nesting violated: restricted RSS below full RSS")
    q = full.k - restricted.k
    df2 = full.n - full.k
    if q == 0:
        return FTestResult(0.0, 0, df2, 1.0)
    F = max(diff, 0.0) / q / (full.rss / df2)
    return FTestResult(F, q, df2, f_pvalue(F, q, df2))


def family_f_test(d: DesignMatrix, full: RegressionResult, family: str) -> FTestResult:
    """Joint test that every dummy of ``family`` is zero."""
    if family not in d.families:
        raise EstimationError(f"no {family} family in design")
    restricted = ols_fit(d.without(d.families[family]))
    return joint_f_test(full, restricted)


def stars(p: float) -> str:
    if not math.isfinite(p):
        return ""
    return "***" if p < 0.001 else "**" if p < 0.01 else "*" if p < 0.05 else ""


COLUMNS = (
    (1, "Baseline", RegressionSpec()),
    (2, "State effects", RegressionSpec(state_effects=True)),
    (3, "Date effects", RegressionSpec(date_effects=True)),
    (4, "State & Date effects", RegressionSpec(state_effects=True, date_effects=True)),
    (5, "Aggregated", RegressionSpec(True, True, aggregation=PER_USER_DAY)),
    (6, "Non-Chinese Ethnicity", RegressionSpec(True, True, subset=NON_CHINESE)),
    (7, "Chinese Ethnicity", RegressionSpec(True, True, subset=CHINESE_ONLY)),
)


@dataclass
class EstimationColumn:
    index: int
    name: str
    spec: RegressionSpec
    design: DesignMatrix | None = None
    result: RegressionResult | None = None
    error: str | None = None


def run_table4(records: Sequence[AttributedTweet], multi_state: str = EXPAND) -> list[EstimationColumn]:
    """The seven estimation columns; a failing column records its reason instead."""
    out = []
    for index, name, spec in COLUMNS:
        spec = replace(spec, multi_state=multi_state)
        col = EstimationColumn(index, name, spec)
        try:
            col.design = build_design(records, spec)
            lost = [f for f in (STATE, DATE) if col.design.dropped.get(f) == "single level"]
            if lost:
                raise EstimationError(f"{'/'.join(lost)} effects: single level")
            col.result = ols_fit(col.design)
        except EstimationError as exc:
            col.error = str(exc)
            log.warning("column (%d) skipped: %s", index, exc)
        out.append(col)
    return out


def family_tests(col: EstimationColumn) -> list[tuple[str, FTestResult]]:
    """F-tests of the state and date families on a fitted column."""
    if col.result is None or col.design is None:
        return []
    return [(fam, family_f_test(col.design, col.result, fam))
            for fam in (STATE, DATE) if fam in col.design.families]
