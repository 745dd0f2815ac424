import math
from datetime import date, timedelta
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geopulse import regression as rg, synth
from geopulse.corpus import ingest
from geopulse.geo import STATE_IDS
from geopulse.pipeline import attribute_all
from geopulse.regression import (
    DesignMatrix, EstimationError, RegressionSpec, SingularDesign, build_design,
    f_pvalue, joint_f_test, ols_fit, t_pvalue,
)

from conftest import tweet
from oracles import betainc_reg, exact_ols, max_rel_err, random_system


def design(X, y, labels=None):
    X = np.asarray(X, float)
    return DesignMatrix(X, np.asarray(y, float), labels or [f"c{i}" for i in range(X.shape[1])])


@pytest.mark.parametrize("seed", range(0, 100, 7))
def test_ols_matches_exact_normal_equations(seed):
    X, y = random_system(seed)
    coef, se, rss = exact_ols(X, y)
    res = ols_fit(design(X, y))
    assert max_rel_err(res.coef, coef) <= 1e-8
    assert max_rel_err(res.se, se) <= 1e-8
    assert res.rss == pytest.approx(rss, rel=1e-10)


def test_exact_fit():
    res = ols_fit(design([[1, 1], [1, 2], [1, 3]], [1, 2, 3]))
    assert res.coef == pytest.approx([0.0, 1.0], abs=1e-14)
    assert res.rss == pytest.approx(0.0, abs=1e-28)


def test_noisy_slope():
    rng = np.random.default_rng(2024)
    x = rng.normal(size=1000)
    y = x + rng.normal(size=1000)
    X = np.column_stack([np.ones(1000), x])
    res = ols_fit(design(X, y))
    assert abs(res.coef[1] - 1.0) < 0.1
    coef, se, _ = exact_ols(X, y)
    assert max_rel_err(res.coef, coef) <= 1e-12


def test_pure_intercept():
    y = np.array([0.3, -0.1, 0.8, 0.25, -0.6])
    res = ols_fit(design(np.ones((5, 1)), y))
    assert res.coef[0] == pytest.approx(y.mean(), rel=1e-15)
    assert res.rss == pytest.approx(5 * y.var(), rel=1e-14)
    assert res.r2 == pytest.approx(0.0, abs=1e-15)


def test_t_and_adjusted_r2_definitions():
    X, y = random_system(3)
    res = ols_fit(design(X, y))
    ybar = y.mean()
    r2 = 1 - res.rss / np.sum((y - ybar) ** 2)
    assert res.r2 == pytest.approx(r2, rel=1e-12)
    assert res.adj_r2 == pytest.approx(1 - (1 - r2) * (res.n - 1) / (res.n - res.k), rel=1e-12)
    assert np.allclose(res.t, res.coef / res.se, rtol=1e-15, atol=0)
    assert np.allclose(res.fitted + res.residuals, y, rtol=0, atol=1e-12)


@given(st.integers(0, 10**6), st.floats(-50, 50))
@settings(max_examples=30, deadline=None)
def test_shift_moves_only_intercept(seed, c):
    X, y = random_system(seed, n_max=60, k_max=6)
    base = ols_fit(design(X, y))
    shifted = ols_fit(design(X, y + c))
    assert shifted.coef[0] == pytest.approx(base.coef[0] + c, abs=1e-10 * max(1.0, abs(c)))
    slopes = np.abs(shifted.coef[1:] - base.coef[1:])
    assert np.all(slopes <= 1e-10 * np.maximum(1.0, np.abs(base.coef[1:])))


def test_singular_design_names_columns():
    x = np.arange(10.0)
    X = np.column_stack([np.ones(10), x, 2 * x, np.sin(x)])
    with pytest.raises(SingularDesign, match="singular design") as exc:
        ols_fit(design(X, np.cos(x), ["constant", "a", "b", "c"]))
    assert set(exc.value.columns) <= {"a", "b"} and len(exc.value.columns) == 1
    with pytest.raises(SingularDesign) as exc:
        ols_fit(design(np.column_stack([np.ones(4), np.zeros(4)]), [1, 2, 3, 5], ["constant", "z"]))
    assert exc.value.columns == ["z"]


def test_underdetermined():
    with pytest.raises(EstimationError, match="underdetermined"):
        ols_fit(design(np.eye(3), [1, 2, 3]))


# hand-built 6-row nested triple; RSS values from exact rational arithmetic:
# full [1, x, z] -> 157/52, [1, x] -> 132/35, [1] -> 35/2
_X6 = np.array([[1, 0, 0], [1, 1, 1], [1, 2, 0], [1, 3, 1], [1, 4, 1], [1, 5, 0]], float)
_Y6 = np.array([1, 3, 2, 5, 4, 6], float)


def test_hand_built_f_test():
    full = ols_fit(design(_X6, _Y6, ["constant", "x", "z"]))
    mid = ols_fit(design(_X6[:, :2], _Y6, ["constant", "x"]))
    null = ols_fit(design(_X6[:, :1], _Y6, ["constant"]))
    assert full.rss == pytest.approx(157 / 52, rel=1e-13)
    assert mid.rss == pytest.approx(132 / 35, rel=1e-13)
    assert null.rss == pytest.approx(35 / 2, rel=1e-13)
    f1 = Fraction(132, 35) - Fraction(157, 52)
    expected_q1 = float(f1 / 1 / (Fraction(157, 52) / 3))
    expected_q2 = float((Fraction(35, 2) - Fraction(157, 52)) / 2 / (Fraction(157, 52) / 3))
    assert expected_q1 == pytest.approx(4107 / 5495, rel=1e-15)
    assert expected_q2 == pytest.approx(2259 / 314, rel=1e-15)
    t1 = joint_f_test(full, mid)
    t2 = joint_f_test(full, null)
    assert abs(t1.F - expected_q1) <= 1e-12 * expected_q1
    assert abs(t2.F - expected_q2) <= 1e-12 * expected_q2
    assert (t1.df1, t1.df2, t2.df1, t2.df2) == (1, 3, 2, 3)
    assert t1.p_value == pytest.approx(betainc_reg(1.5, 0.5, 3 / (3 + expected_q1)), rel=1e-12)


def test_f_equals_t_squared():
    X, y = random_system(11)
    full = ols_fit(design(X, y))
    for j in range(1, X.shape[1]):
        keep = [i for i in range(X.shape[1]) if i != j]
        restricted = ols_fit(design(X[:, keep], y, [full.labels[i] for i in keep]))
        f = joint_f_test(full, restricted)
        assert f.F == pytest.approx(full.t[j] ** 2, rel=1e-8)
        assert f.p_value == pytest.approx(full.p[j], rel=1e-7)


def test_restricted_equals_full():
    full = ols_fit(design(_X6, _Y6))
    f = joint_f_test(full, full)
    assert (f.F, f.df1, f.p_value) == (0.0, 0, 1.0)


def test_nesting_violations():
    full = ols_fit(design(_X6, _Y6, ["constant", "x", "z"]))
    other = ols_fit(design(_X6[:, [0, 2]], _Y6, ["constant", "w"]))
    with pytest.raises(EstimationError, match="nesting violated"):
        joint_f_test(full, other)
    fewer = ols_fit(design(_X6[:5, :2], _Y6[:5], ["constant", "x"]))
    with pytest.raises(EstimationError, match="nesting violated"):
        joint_f_test(full, fewer)
    bigger = ols_fit(design(_X6[:, :2], _Y6, ["constant", "x"]))
    with pytest.raises(EstimationError, match="nesting violated"):
        joint_f_test(bigger, full)


@pytest.mark.parametrize("t,df", [(0.0, 5), (1.0, 1), (2.5, 10), (-3.3, 40), (8.0, 245589)])
def test_t_pvalue_against_mpmath(t, df):
    assert t_pvalue(t, df) == pytest.approx(betainc_reg(df / 2, 0.5, df / (df + t * t)), rel=1e-10)


@pytest.mark.parametrize("F,d1,d2", [(0.5, 1, 3), (6.88, 50, 245589), (16.99, 17, 245589),
                                     (1.2, 9, 40), (3.0, 2, 2)])
def test_f_pvalue_against_mpmath(F, d1, d2):
    want = betainc_reg(d2 / 2, d1 / 2, d2 / (d2 + d1 * F))
    got = f_pvalue(F, d1, d2)
    assert got == pytest.approx(want, rel=1e-9, abs=1e-300)
    assert 0.0 <= got <= 1.0
    assert f_pvalue(0.0, d1, d2) == 1.0


def test_large_sample_tail_probabilities_are_tiny():
    assert f_pvalue(6.88, 50, 245589) < 1e-4
    assert f_pvalue(16.99, 17, 245589) < 1e-4


def test_stars():
    assert [rg.stars(p) for p in (0.0009, 0.001, 0.009, 0.04, 0.05, math.nan)] == [
        "***", "**", "**", "*", "", ""]


def _panel(n_states, n_dates, n=500, seed=0):
    rng = np.random.default_rng(seed)
    days = [date(2015, 5, 16) + timedelta(days=d) for d in range(n_dates)]
    out = []
    for i in range(n):
        out.append(tweet(
            polarity=float(rng.uniform(-1, 1)), states=[STATE_IDS[i % n_states]],
            day=days[(i // n_states) % n_dates], user=f"u{i}", tweet_id=str(i),
            chinese=float(rng.random() < 0.3), followers=float(rng.integers(0, 5000)),
            followees=float(rng.integers(0, 500)), retweet_count=float(rng.poisson(2)),
            reply=float(rng.random() < 0.2), experience=float(rng.integers(0, 3000)),
            intensity=float(rng.exponential(3)),
        ))
    return out, days


def test_dummy_column_counts():
    tws, _ = _panel(51, 18, n=51 * 18 * 2)
    d = build_design(tws, RegressionSpec(state_effects=True, date_effects=True))
    assert len(d.families["state"]) == 50
    assert len(d.families["date"]) == 17
    d0 = build_design(tws, RegressionSpec())
    assert d0.labels == ["constant", *rg.REGRESSORS] and d0.k == 8
    assert d.labels.count("constant") == 1


def test_dummy_coding_invariance():
    tws, days = _panel(5, 4, n=500, seed=5)
    spec = RegressionSpec(state_effects=True, date_effects=True)
    fits = []
    for s, d in product(STATE_IDS[:5], days):
        dm = build_design(tws, spec, references={"state": s, "date": d.isoformat()})
        assert dm.references == {"state": s, "date": d.isoformat()}
        fits.append(ols_fit(dm))
    base = fits[0]
    for f in fits[1:]:
        assert np.max(np.abs(f.fitted - base.fitted)) <= 1e-10
        assert abs(f.rss - base.rss) <= 1e-10
        for name in rg.REGRESSORS:
            assert f[name] == pytest.approx(base[name], rel=1e-9, abs=1e-12)


def test_unobserved_reference_rejected():
    tws, _ = _panel(3, 2, n=30)
    with pytest.raises(ValueError, match="not observed"):
        build_design(tws, RegressionSpec(state_effects=True), references={"state": "ZZ"})


def test_subset_drops_chinese_and_constant_columns():
    tws, _ = _panel(4, 3, n=120)
    d = build_design(tws, RegressionSpec(True, True, subset=rg.CHINESE_ONLY))
    assert "chinese" not in d.labels and d.dropped["chinese"] == "constant within subset"
    flat = [tweet(polarity=float(i % 3), states=["CA", "NY"][i % 2:i % 2 + 1], user=str(i),
                  followers=float(i)) for i in range(12)]
    d = build_design(flat, RegressionSpec())
    assert d.dropped["followees"] == "constant" and "followees" not in d.labels


def test_single_level_family_dropped():
    tws = [tweet(polarity=0.1 * i, states=[s], user=str(i), followers=float(i), followees=float(i % 4),
                 retweet_count=float(i % 3), reply=float(i % 2), experience=float(i * i % 7),
                 intensity=float(i % 5), chinese=float(i % 6 == 0))
           for i, s in enumerate(["CA", "NY", "TX"] * 8)]
    d = build_design(tws, RegressionSpec(state_effects=True, date_effects=True))
    assert d.dropped["date"] == "single level" and "date" not in d.families


def test_multi_state_modes():
    tws = [tweet(states=["KS", "MO"]), tweet(states=["CA"])]
    expand = rg.select_rows(tws, RegressionSpec())
    first = rg.select_rows(tws, RegressionSpec(multi_state=rg.FIRST_STATE))
    assert [s for _, s in expand] == ["KS", "MO", "CA"]
    assert [s for _, s in first] == ["KS", "CA"]


def test_aggregate_user_day_examples():
    d1, d2 = date(2015, 5, 16), date(2015, 5, 17)
    out = rg.aggregate_user_day([tweet(0.2, user="a", day=d1, reply=1.0),
                                 tweet(0.4, user="a", day=d1, reply=0.0)])
    assert len(out) == 1
    assert out[0].polarity == pytest.approx(0.3, abs=1e-15)
    assert out[0].reply == 0.5 and out[0].n_tweets == 2
    assert len(rg.aggregate_user_day([tweet(user="a", day=d1), tweet(user="b", day=d1)])) == 2
    assert len(rg.aggregate_user_day([tweet(user="a", day=d1), tweet(user="a", day=d2)])) == 2


@given(st.lists(st.tuples(st.sampled_from("abc"), st.integers(0, 3), st.floats(-1, 1)),
                max_size=40))
def test_aggregate_preserves_groups(rows):
    tws = [tweet(p, user=u, day=date(2015, 5, 16) + timedelta(days=d)) for u, d, p in rows]
    out = rg.aggregate_user_day(tws)
    assert len(out) == len({(u, d) for u, d, _ in rows})
    assert sum(t.n_tweets for t in out) == len(rows)
    assert all(-1 <= t.polarity <= 1 for t in out)


def test_planted_effect_column4_single_seed():
    tws, slope = synth.planted_panel(seed=0)
    spec = rg.COLUMNS[3][2]
    res = ols_fit(build_design(tws, spec))
    term = res.term("intensity")
    assert term["coef"] > 0 and term["p"] < 1e-3
    assert term["coef"] == pytest.approx(slope, rel=0.5)


def test_run_table4_on_desk_corpus(resources):
    lines = synth.raw_tweets(3000, seed=3, intensity_effect=1.5)
    recs = ingest(lines).records
    att = attribute_all(recs, resources).tweets
    cols = rg.run_table4(att)
    assert [c.index for c in cols] == list(range(1, 8))
    named = ["followers", "followees", "retweet", "reply", "experience", "intensity"]
    for c in cols:
        assert c.error is None, c.error
        for name in named:
            assert np.isfinite(c.result.term(name)["t"])
        assert ("chinese" in c.result.labels) == (c.index <= 5)
    assert cols[2].result.n == cols[0].result.n
    assert cols[4].result.n < cols[3].result.n
    assert cols[5].result.n + cols[6].result.n == cols[0].result.n
    tests = rg.family_tests(cols[3])
    assert [fam for fam, _ in tests] == ["state", "date"]
    assert all(f.df1 >= 1 and f.df2 >= 1 and f.F >= 0 for _, f in tests)
    assert tests[0][1].df1 == len(cols[3].design.families["state"])


def test_run_table4_isolates_failures():
    tws, _ = _panel(3, 1, n=40)
    cols = rg.run_table4(tws)
    assert cols[0].error is None
    assert "single level" in cols[2].error and cols[2].result is None
