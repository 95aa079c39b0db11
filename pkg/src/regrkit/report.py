"""Prediction tables, correlation coefficients and the growth/profit report."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from decimal import ROUND_UP, Decimal
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import Dataset, pearson_arrays
from .errors import (
    AttributeMismatchError,
    BaselineError,
    DataError,
    NegativeCostError,
    ZeroActualError,
)
from .ingest import format_number
from .linreg import LinearModel, predict_linear
from .smoreg import SvrModel, predict_svr

TRENDS = ("NIL", "INC", "DEC", "FLAT")


@dataclass(frozen=True)
class PredictionRow:
    actual: float
    predicted: float
    difference: float
    error_pct: float

    def __post_init__(self):
        if self.actual == 0:
            raise ZeroActualError("error percentage is undefined for an actual value of 0")

    @classmethod
    def of(cls, actual: float, predicted: float) -> "PredictionRow":
        if actual == 0:
            raise ZeroActualError("error percentage is undefined for an actual value of 0")
        diff = predicted - actual
        return cls(actual, predicted, diff, 100.0 * diff / actual)


def predict(m, instance) -> float:
    if isinstance(m, LinearModel):
        return predict_linear(m, instance)
    if isinstance(m, SvrModel):
        return predict_svr(m, instance)
    raise TypeError(f"not a model: {type(m).__name__}")


def _check(m, d: Dataset):
    missing = [a for a in (*m.attributes, m.target) if a not in d.names]
    if missing:
        raise AttributeMismatchError(f"dataset lacks model attribute(s): {', '.join(missing)}")


def evaluate_model(m, d: Dataset) -> list[PredictionRow]:
    """Predict every instance of ``d`` and compare with the actual target."""
    _check(m, d)
    actual = d.column(m.target)
    rows = []
    for i, inst in enumerate(d.instances()):
        if actual[i] == 0:
            raise ZeroActualError(f"row {i + 1}: actual {m.target} is 0")
        rows.append(PredictionRow.of(float(actual[i]), predict(m, inst)))
    return rows


def correlation_coefficient(rows: Sequence[PredictionRow]) -> float:
    return pearson_arrays([r.predicted for r in rows], [r.actual for r in rows],
                          ("predicted", "actual"))


# --- spreadsheet-style display ------------------------------------------------

def round_up(x: float, decimals: int = 0) -> float:
    """Round away from zero at ``decimals`` places (spreadsheet ROUNDUP)."""
    q = Decimal(1).scaleb(-decimals)
    return float(Decimal(repr(float(x))).quantize(q, rounding=ROUND_UP))


def printed_model(m, decimals: int = 4):
    """The model as its equation is printed: every constant at ``decimals`` places."""
    if isinstance(m, LinearModel):
        return m.rounded(decimals)
    return replace(m, weights=tuple(round(w, decimals) for w in m.weights),
                   bias=round(m.bias, decimals))


def spreadsheet_rows(m, d: Dataset, coef_decimals: int = 4,
                     pct_decimals: int | None = None) -> list[PredictionRow]:
    """Prediction table computed the way a spreadsheet would from a printed equation.

    Predictions use the model with constants rounded to ``coef_decimals``
    and are rounded up to whole units; the error percentage is then rounded
    up at ``pct_decimals`` places (3 for linear models, 0 for SVR by default).
    """
    if pct_decimals is None:
        pct_decimals = 3 if isinstance(m, LinearModel) else 0
    shown = printed_model(m, coef_decimals)
    out = []
    for r in evaluate_model(shown, d):
        pred = round_up(r.predicted, 0)
        diff = pred - r.actual
        out.append(PredictionRow(r.actual, pred, diff,
                                 round_up(100.0 * diff / r.actual, pct_decimals)))
    return out


# --- growth report -------------------------------------------------------------

@dataclass(frozen=True)
class GrowthRow:
    label: str
    page_views: float
    total_cost: float
    estimated_views: int
    diff: float
    profit_pct: int
    trend: str


def _num(x: Fraction):
    return int(x) if x.denominator == 1 else float(x)


def growth_report(d: Dataset, pv_attr: str, cost_attrs: Sequence[str],
                  baseline_row: int = 1) -> list[GrowthRow]:
    """Spend-versus-views report anchored on a baseline month.

    The baseline row fixes a cost per page view ``c0``; each month's spend
    is converted to the page views it "should" have bought,
    ``ceil(cost / c0)``, and the surplus views give the profit percentage
    ``ceil(100 * surplus / views)``. Trend compares profit with the
    previous row. Exact rational arithmetic keeps whole quotients whole.
    """
    if not cost_attrs:
        raise DataError("at least one cost attribute is required")
    views = d.column(pv_attr)
    cost_cols = [d.column(a) for a in cost_attrs]
    for a, col in zip(cost_attrs, cost_cols):
        if (col < 0).any():
            i = int(np.argmax(col < 0))
            raise NegativeCostError(f"row {i + 1}: negative cost in {a!r}")
    if not 1 <= baseline_row <= d.n:
        raise BaselineError(f"baseline row {baseline_row} is outside 1..{d.n}")

    totals = [sum((Fraction(float(col[i])) for col in cost_cols), Fraction(0))
              for i in range(d.n)]
    b = baseline_row - 1
    base_views = Fraction(float(views[b]))
    if base_views <= 0 or totals[b] <= 0:
        raise BaselineError(
            f"baseline row {baseline_row} needs positive page views and positive total cost")
    rate = totals[b] / base_views

    labels = d.labels(d.label_names[0]) if d.label_names else [str(i + 1) for i in range(d.n)]
    rows = []
    prev = None
    for i in range(d.n):
        pv = Fraction(float(views[i]))
        if pv <= 0:
            raise DataError(f"row {i + 1}: page views must be positive")
        est = math.ceil(totals[i] / rate)
        diff = pv - est
        profit = math.ceil(100 * diff / pv)
        if prev is None:
            trend = "NIL"
        elif profit > prev:
            trend = "INC"
        elif profit < prev:
            trend = "DEC"
        else:
            trend = "FLAT"
        prev = profit
        rows.append(GrowthRow(labels[i], _num(pv), _num(totals[i]), est, _num(diff),
                              profit, trend))
    return rows


# --- output ----------------------------------------------------------------------

def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, int):
        return str(v)
    return format_number(float(v))


PREDICTION_HEADER = ("actual", "predicted", "difference", "error_pct")
GROWTH_HEADER = ("label", "page_views", "total_cost", "estimated_views", "diff",
                 "profit_pct", "trend")


def prediction_table(rows: Sequence[PredictionRow], pct_decimals: int | None = None):
    def pct(v):
        return _fmt(v) if pct_decimals is None else f"{v:.{pct_decimals}f}"

    return PREDICTION_HEADER, [
        [_fmt(r.actual), _fmt(r.predicted), _fmt(r.difference), pct(r.error_pct)]
        for r in rows]


def growth_table(rows: Sequence[GrowthRow]):
    return GROWTH_HEADER, [
        [r.label, _fmt(r.page_views), _fmt(r.total_cost), str(r.estimated_views),
         _fmt(r.diff), str(r.profit_pct), r.trend] for r in rows]


def to_csv(table) -> str:
    return _csv(*table)


def to_pretty(table) -> str:
    header, rows = table
    cells = [list(header)] + [list(r) for r in rows]
    widths = [max(len(str(row[c])) for row in cells) for c in range(len(header))]
    lines = ["  ".join(str(v).rjust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"
