import itertools
import math

import numpy as np
import pytest

from regrkit.core import AttributeSpec, build_dataset
from regrkit.errors import DataError, GuardExceededError, UnknownAttributeError
from regrkit.linreg import LinearModel, fit_linreg, fit_ols, predict_linear, select_attributes_aic

ALL5 = ["Subscribers_total", "Banner_Ad_Spend", "PPC_Spend", "Reminder_Emails_Sent",
        "Videos_Upload"]


def make(X, y):
    names = [f"x{i}" for i in range(X.shape[1])]
    specs = [AttributeSpec(a, "numeric", i) for i, a in enumerate(names + ["y"])]
    return build_dataset(specs, np.column_stack([X, y]).tolist()), names


def test_exact_fit_recovers_plane():
    X = np.array([[1, 2], [2, 1], [3, 5], [4, 3], [5, 8.0]])
    y = 3 * X[:, 0] - 2 * X[:, 1] + 7
    d, names = make(X, y)
    m = fit_ols(d, "y", names)
    assert m.coefficient("x0") == pytest.approx(3)
    assert m.coefficient("x1") == pytest.approx(-2)
    assert m.intercept == pytest.approx(7)
    assert predict_linear(m, {"x0": 10, "x1": 1}) == pytest.approx(35)


def test_collinear_columns_fall_back_to_ridge():
    x = np.arange(10.0)
    X = np.column_stack([x, 2 * x])
    d, names = make(X, 5 * x + 1)
    m = fit_ols(d, "y", names)
    pred = [predict_linear(m, inst) for inst in d.instances()]
    np.testing.assert_allclose(pred, 5 * x + 1, rtol=1e-6, atol=1e-6)
    assert all(math.isfinite(c) for _, c in m.terms)


def _brute_force(X, y, criterion):
    n, p = X.shape

    def sse(cols):
        A = np.column_stack([X[:, list(cols)], np.ones(n)])
        r = y - A @ np.linalg.lstsq(A, y, rcond=None)[0]
        return float(r @ r)

    full = sse(range(p))
    best = None
    for k in range(1, p + 1):
        for cols in itertools.combinations(range(p), k):
            s = sse(cols)
            score = (n * math.log(s / n) if criterion == "loglik"
                     else s / full * (n - p - 1)) + 2 * (k + 1)
            if best is None or score < best[0] - 1e-9:
                best = (score, cols)
    return list(best[1])


@pytest.mark.parametrize("criterion", ["ratio", "loglik"])
def test_exhaustive_matches_brute_force(criterion):
    rng = np.random.default_rng(5)
    for _ in range(30):
        n, p = int(rng.integers(10, 25)), int(rng.integers(2, 6))
        X = rng.normal(size=(n, p))
        y = X[:, 0] * 2 + rng.normal(size=n) * rng.uniform(0.2, 3)
        d, names = make(X, y)
        got = select_attributes_aic(d, "y", names, "exhaustive", criterion)
        assert got == [names[i] for i in _brute_force(X, y, criterion)]


def test_loglik_criterion_on_traffic(traffic):
    # the log-likelihood form keeps four attributes; the ratio form keeps two
    got = select_attributes_aic(traffic, "Page_Views", ALL5, "exhaustive", "loglik")
    assert got == ["Subscribers_total", "PPC_Spend", "Reminder_Emails_Sent", "Videos_Upload"]


def test_greedy_never_worse_than_full(traffic):
    got = select_attributes_aic(traffic, "Page_Views", ALL5, "greedy")
    assert set(got) <= set(ALL5) and got


def test_m5_on_full_candidate_set(traffic):
    assert select_attributes_aic(traffic, "Page_Views", ALL5, "m5") == [
        "Subscribers_total", "Reminder_Emails_Sent"]


def test_guards():
    rng = np.random.default_rng(0)
    d, names = make(rng.normal(size=(30, 21)), rng.normal(size=30))
    with pytest.raises(GuardExceededError):
        select_attributes_aic(d, "y", names, "exhaustive")
    with pytest.raises(DataError):
        fit_linreg(d, "y", names, "sideways")
    with pytest.raises(DataError):
        fit_ols(d, "y", ["x0", "y"])
    with pytest.raises(DataError):
        fit_ols(d, "y", [])
    with pytest.raises(DataError):
        select_attributes_aic(d, "y", names[:3], "greedy", "bic")


def test_model_helpers():
    m = LinearModel("t", (("a", 1.23456), ("b", -2.0)), 0.5)
    assert m.attributes == ["a", "b"]
    assert m.rounded(2).terms == (("a", 1.23), ("b", -2.0))
    assert "1.2346 * a" in m.equation()
    with pytest.raises(UnknownAttributeError):
        m.coefficient("z")
    with pytest.raises(DataError):
        predict_linear(m, {"a": 1})
