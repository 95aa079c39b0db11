"""Acceptance criteria, one marked group per criterion.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints a
PASS/FAIL line per criterion. Running this file directly does the same.
"""

import itertools
import math
import time

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from regrkit.cfs import best_first_search, cfs_merit, cfs_select, merit_weights
from regrkit.core import AttributeSpec, build_dataset, correlation_matrix
from regrkit.filters import NORMALIZE, STANDARDIZE, apply_filter, fit_filter
from regrkit.ingest import parse_arff, write_arff
from regrkit.linreg import fit_linreg, fit_ols, select_attributes_aic
from regrkit.report import (
    correlation_coefficient,
    evaluate_model,
    growth_report,
    predict,
    spreadsheet_rows,
)
from regrkit.smoreg import dual_objective, fit_smoreg, kkt_report, solve_svr_dual

ST, BAS, PPC, REM, VU, PV = ("Subscribers_total", "Banner_Ad_Spend", "PPC_Spend",
                             "Reminder_Emails_Sent", "Videos_Upload", "Page_Views")
ALL5 = [ST, BAS, PPC, REM, VU]

PRINTED_CORR = {
    ST: [1, 0.95, 0.90, 0.93, 0.78, 0.99],
    BAS: [0.95, 1, 0.98, 0.84, 0.82, 0.94],
    PPC: [0.90, 0.98, 1, 0.74, 0.78, 0.88],
    REM: [0.93, 0.84, 0.74, 1, 0.75, 0.95],
    VU: [0.78, 0.82, 0.78, 0.75, 1, 0.77],
    PV: [0.99, 0.94, 0.88, 0.95, 0.77, 1],
}

SHEET_PRED_ST_REM = [82075, 122368, 172733, 258909, 291308, 405251, 546349, 657569, 678259,
                  743938, 858830, 1098891, 1360869, 1544234, 1873442]
SHEET_ERR_ST_REM = [310.375, 22.368, -13.634, 3.564, -2.898, 1.313, -0.664, 1.165, -3.106,
                 -7.008, -4.575, -4.445, 4.683, 4.694, -1.398]

REF_SVR_NORMALIZED = ([0.5108, 0.0752, 0.1439, 0.3368, -0.0676], 0.0315)
REF_SVR_STANDARDIZED = ([0.5531, 0.0306, 0.1491, 0.378, -0.08], -0.0036)
REF_SVR_RAW = ([7.5597, -14.6798, 40.8236, 123.227, -197.3539], 19693.6481)

REF_GROWTH = [  # estimated, diff, profit %, trend
    (20000, 0, 0, "NIL"), (76924, 23076, 24, "INC"), (92308, 107692, 54, "INC"),
    (49231, 200769, 81, "INC"), (47693, 252307, 85, "INC"), (299508, 100492, 26, "DEC"),
    (517908, 32092, 6, "DEC"), (348893, 301107, 47, "INC"), (107354, 592646, 85, "INC"),
    (360708, 439292, 55, "DEC"), (442216, 457784, 51, "DEC"),
    (900985, 249015, 22, "DEC"), (903939, 396061, 31, "INC"), (762554, 712446, 49, "INC"),
    (1707262, 192738, 11, "DEC"),
]


def rel_close(got, want, rel):
    return abs(got - want) <= rel * abs(want)


def band_ok(got, want):
    """5% relative or 0.01 absolute, whichever is looser."""
    return abs(got - want) <= max(0.05 * abs(want), 0.01)


# --- 1 ----------------------------------------------------------------------------

@pytest.mark.criterion(1)
def test_c1_correlation_cells(traffic):
    corr = correlation_matrix(traffic, ALL5 + [PV])
    bad = [(a, b, corr.r(a, b), PRINTED_CORR[a][j])
           for a in PRINTED_CORR for j, b in enumerate(ALL5 + [PV])
           if abs(corr.r(a, b) - PRINTED_CORR[a][j]) > 0.005]
    assert not bad


@pytest.mark.criterion(1)
def test_c1_correlation_runtime(traffic):
    names = ALL5 + [PV]
    correlation_matrix(traffic, names)
    best = min(_timed(lambda: correlation_matrix(traffic, names)) for _ in range(50))
    assert best < 1e-3


def _timed(fn):
    t = time.perf_counter()
    fn()
    return time.perf_counter() - t


# --- 2, 3 -----------------------------------------------------------------------

@pytest.mark.criterion(2)
def test_c2_exhaustive_selects_st_rem(traffic):
    assert select_attributes_aic(traffic, PV, ALL5, "exhaustive") == [ST, REM]


@pytest.mark.criterion(2)
def test_c2_coefficients(traffic):
    m = fit_linreg(traffic, PV, ALL5, "exhaustive")
    assert m.attributes == [ST, REM]
    assert rel_close(m.coefficient(ST), 10.0731, 1e-3)
    assert rel_close(m.coefficient(REM), 68.0727, 1e-3)
    assert rel_close(m.intercept, 72001.7239, 1e-3)


@pytest.mark.criterion(3)
def test_c3_selects_st_bas_ppc(traffic):
    assert select_attributes_aic(traffic, PV, [ST, BAS, PPC, VU], "m5") == [ST, BAS, PPC]


@pytest.mark.criterion(3)
def test_c3_coefficients(traffic):
    m = fit_linreg(traffic, PV, [ST, BAS, PPC, VU], "m5")
    assert m.attributes == [ST, BAS, PPC]
    for attr, want in [(ST, 12.5469), (BAS, 14.8024), (PPC, -28.6031)]:
        assert rel_close(m.coefficient(attr), want, 1e-3)
    assert rel_close(m.intercept, 147995.9826, 1e-3)


# --- 4 ----------------------------------------------------------------------------

@pytest.fixture(scope="module")
def st_rem_model(traffic):
    return fit_linreg(traffic, PV, ALL5, "exhaustive")


@pytest.mark.criterion(4)
def test_c4_predictions_integer_exact(traffic, st_rem_model):
    rows = spreadsheet_rows(st_rem_model, traffic)
    assert [int(r.predicted) for r in rows] == SHEET_PRED_ST_REM


@pytest.mark.criterion(4)
def test_c4_error_percent_three_decimals(traffic, st_rem_model):
    rows = spreadsheet_rows(st_rem_model, traffic)
    assert [f"{r.error_pct:.3f}" for r in rows] == [f"{v:.3f}" for v in SHEET_ERR_ST_REM]


# --- 5, 6, 7 --------------------------------------------------------------------

@pytest.fixture(scope="module")
def svr_models(traffic):
    return {kind: fit_smoreg(traffic, PV, ALL5, kind) for kind in
            (NORMALIZE, STANDARDIZE, "none")}


def _check_band(m, ref):
    weights, bias = ref
    bad = [(a, w, v) for a, w, v in zip(m.attributes, m.weights, weights) if not band_ok(w, v)]
    assert not bad
    assert band_ok(m.bias, bias)


def _check_dual(m, d):
    assert kkt_report(m, d) <= m.params.tolerance
    assert abs(sum(m.duals)) <= 1e-9 * m.params.C * d.n
    assert max(abs(b) for b in m.duals) <= m.params.C * (1 + 1e-12)


@pytest.mark.criterion(5)
def test_c5_normalized_weights(svr_models):
    _check_band(svr_models[NORMALIZE], REF_SVR_NORMALIZED)


@pytest.mark.criterion(5)
def test_c5_normalized_kkt_and_sum(traffic, svr_models):
    _check_dual(svr_models[NORMALIZE], traffic)


@pytest.mark.criterion(6)
def test_c6_standardized_weights(svr_models):
    _check_band(svr_models[STANDARDIZE], REF_SVR_STANDARDIZED)


@pytest.mark.criterion(6)
def test_c6_standardized_kkt_and_sum(traffic, svr_models):
    _check_dual(svr_models[STANDARDIZE], traffic)


@pytest.mark.criterion(7)
def test_c7_raw_sign_pattern(svr_models):
    m = svr_models["none"]
    assert [math.copysign(1, w) for w in m.weights] == [1, -1, 1, 1, -1]
    assert m.bias > 0


@pytest.mark.criterion(7)
def test_c7_raw_magnitudes_at_c1(svr_models):
    # documented choice: C = 1 (C = 2 gives the same optimum, C = 0.5 does not)
    m = svr_models["none"]
    assert m.params.C == 1.0
    weights, bias = REF_SVR_RAW
    assert all(rel_close(w, v, 0.05) for w, v in zip(m.weights, weights))
    assert rel_close(m.bias, bias, 0.05)


@pytest.mark.criterion(7)
def test_c7_raw_jun12_prediction(traffic, svr_models):
    jun12 = traffic.instance(traffic.n - 1)
    assert rel_close(predict(svr_models["none"], jun12), 1_900_000, 0.005)


# --- 8 ----------------------------------------------------------------------------

@pytest.mark.criterion(8)
def test_c8_cfs_indices(traffic):
    res = cfs_select(traffic, PV)
    assert res.indices == (1, 4)
    assert res.selected == (ST, REM)


# --- 9 ----------------------------------------------------------------------------

@pytest.mark.criterion(9)
def test_c9_cc_linear_st_rem(traffic, st_rem_model):
    cc = correlation_coefficient(evaluate_model(st_rem_model, traffic))
    assert abs(cc - 0.9973) <= 0.001


@pytest.mark.criterion(9)
def test_c9_cc_linear_st_bas_ppc(traffic):
    m = fit_linreg(traffic, PV, [ST, BAS, PPC, VU], "m5")
    cc = correlation_coefficient(evaluate_model(m, traffic))
    assert abs(cc - 0.9931) <= 0.001, f"training CC {cc:.5f}"


@pytest.mark.criterion(9)
@pytest.mark.parametrize("kind", [NORMALIZE, STANDARDIZE, "none"])
def test_c9_cc_svr(traffic, svr_models, kind):
    cc = correlation_coefficient(evaluate_model(svr_models[kind], traffic))
    # printed CCs 0.9975 / 0.9977 / 0.997; each model must sit within 0.003 of its value
    want = {NORMALIZE: 0.9975, STANDARDIZE: 0.9977, "none": 0.997}[kind]
    assert abs(cc - want) <= 0.003


# --- 10 ---------------------------------------------------------------------------

@pytest.mark.criterion(10)
def test_c10_growth_table(traffic):
    rows = growth_report(traffic, PV, [BAS, PPC], baseline_row=1)
    got = [(r.estimated_views, int(r.diff), r.profit_pct, r.trend) for r in rows]
    assert got == REF_GROWTH


# --- 11 ---------------------------------------------------------------------------

_names = st.text(min_size=1, max_size=8).filter(lambda s: s.strip() == s)
_finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@st.composite
def datasets(draw):
    n_attr = draw(st.integers(1, 5))
    names = draw(st.lists(_names, min_size=n_attr, max_size=n_attr, unique=True))
    kinds = draw(st.lists(st.sampled_from(["numeric", "label"]),
                          min_size=n_attr, max_size=n_attr))
    n = draw(st.integers(1, 6))
    rows = [[draw(_finite) if k == "numeric" else draw(st.text(max_size=6)) for k in kinds]
            for _ in range(n)]
    specs = [AttributeSpec(a, k, i) for i, (a, k) in enumerate(zip(names, kinds))]
    return build_dataset(specs, rows)


@pytest.mark.criterion(11)
@settings(max_examples=200, deadline=None, suppress_health_check=list(HealthCheck))
@given(d=datasets(), relation=_names)
def test_c11_arff_round_trip(d, relation):
    back = parse_arff(write_arff(d, relation))
    assert back.attributes == d.attributes
    for r1, r2 in zip(back.rows, d.rows):
        for v1, v2 in zip(r1, r2):
            assert v1 == v2 and (not isinstance(v1, float) or
                                 math.copysign(1, v1) == math.copysign(1, v2))
    assert len(back.rows) == len(d.rows)


_cols = st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=20).filter(
    lambda xs: max(xs) - min(xs) > 1e-3 * max(1.0, max(map(abs, xs))))


@pytest.mark.criterion(11)
@settings(max_examples=200, deadline=None)
@given(xs=_cols, kind=st.sampled_from([NORMALIZE, STANDARDIZE]))
def test_c11_filter_inverse_identity(xs, kind):
    d = build_dataset([AttributeSpec("x", "numeric", 0)], [[x] for x in xs])
    f = fit_filter(d, kind, ["x"])
    back = f.inverse("x", apply_filter(f, d).column("x"))
    np.testing.assert_allclose(back, xs, rtol=1e-9, atol=1e-9)


@pytest.mark.criterion(11)
def test_c11_ols_matches_direct_solve():
    rng = np.random.default_rng(11)
    for _ in range(100):
        n, p = int(rng.integers(8, 40)), int(rng.integers(1, 6))
        X = rng.normal(size=(n, p)) * rng.uniform(0.1, 100, size=p) + rng.normal(size=p) * 10
        y = X @ rng.normal(size=p) + rng.normal() + rng.normal(size=n)
        names = [f"x{i}" for i in range(p)]
        specs = [AttributeSpec(a, "numeric", i) for i, a in enumerate(names + ["y"])]
        d = build_dataset(specs, np.column_stack([X, y]).tolist())
        m = fit_ols(d, "y", names)
        A = np.column_stack([X, np.ones(n)])
        want = np.linalg.solve(A.T @ A, A.T @ y)
        got = np.array([c for _, c in m.terms] + [m.intercept])
        np.testing.assert_allclose(got, want, rtol=1e-8, atol=1e-8 * np.abs(want).max())


@pytest.mark.criterion(11)
def test_c11_smo_monotone_and_feasible():
    rng = np.random.default_rng(7)
    for _ in range(50):
        X = rng.normal(size=(20, 4))
        y = X @ rng.normal(size=4) + 0.3 * rng.normal(size=20)
        C = float(rng.choice([0.1, 1.0, 10.0]))
        K = X @ X.T
        trace = []

        def record(beta, _):
            assert np.all(np.abs(beta) <= C * (1 + 1e-12))
            assert abs(beta.sum()) <= 1e-9 * C * 20
            trace.append(dual_objective(beta, K, y, 1e-3))

        sol = solve_svr_dual(X, y, C=C, epsilon=1e-3, tol=1e-3, callback=record)
        steps = np.diff([0.0] + trace)
        assert np.all(steps >= -1e-10 * np.maximum(1.0, np.abs(trace)))
        assert sol.violation <= 1e-3


@pytest.mark.criterion(11)
@pytest.mark.parametrize("weighting", ["unit", "sd"])
def test_c11_cfs_search_equals_exhaustive(weighting):
    rng = np.random.default_rng(3)
    for _ in range(300):
        n, p = int(rng.integers(5, 30)), int(rng.integers(2, 7))
        A = rng.normal(size=(n, p)) @ rng.normal(size=(p, p)) + rng.normal(size=(n, p))
        A *= rng.uniform(0.1, 50, size=p)
        names = [f"a{i}" for i in range(p)]
        specs = [AttributeSpec(a, "numeric", i) for i, a in enumerate(names)]
        d = build_dataset(specs, A.tolist())
        target, cands = names[-1], names[:-1]
        corr = correlation_matrix(d)
        w = merit_weights(d, cands, weighting)
        _, merit = best_first_search(corr, cands, target, weights=w)
        best = max(cfs_merit(corr, s, target, w) for k in range(1, len(cands) + 1)
                   for s in itertools.combinations(cands, k))
        assert merit == pytest.approx(best, rel=1e-12, abs=0)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
