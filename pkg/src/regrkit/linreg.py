"""Ordinary least squares with Akaike-style attribute elimination.

Two subset scores are available:

``ratio`` (default)
    ``SSE_S / SSE_full * (n - p - 1) + 2 * (|S| + 1)``, where ``SSE_full`` is
    the residual sum of squares with every candidate included and ``p`` the
    number of candidates (a Mallows-Cp style scaling of the SSE).
``loglik``
    ``n * ln(SSE_S / n) + 2 * (|S| + 1)``, the Gaussian log-likelihood AIC.

Search modes: ``greedy`` removes whichever attribute lowers the score most,
``m5`` removes the attribute with the smallest standardized coefficient
while that lowers the score, and ``exhaustive`` scores every non-empty
subset.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import Dataset
from .errors import (
    DataError,
    DegenerateSystemError,
    GuardExceededError,
    UnknownAttributeError,
)

SELECTIONS = ("none", "greedy", "exhaustive", "m5")
CRITERIA = ("ratio", "loglik")
EXHAUSTIVE_LIMIT = 20

_PIVOT_RTOL = 1e-12
_RIDGE_FACTOR = 1e-8


@dataclass(frozen=True)
class LinearModel:
    target: str
    terms: tuple[tuple[str, float], ...]
    intercept: float

    @property
    def attributes(self) -> list[str]:
        return [a for a, _ in self.terms]

    def coefficient(self, attr: str) -> float:
        for a, c in self.terms:
            if a == attr:
                return c
        raise UnknownAttributeError(attr)

    def rounded(self, decimals: int = 4) -> "LinearModel":
        """Copy with coefficients rounded as they appear in a printed equation."""
        return LinearModel(self.target,
                           tuple((a, round(c, decimals)) for a, c in self.terms),
                           round(self.intercept, decimals))

    def equation(self, decimals: int = 4) -> str:
        parts = [f"{c:.{decimals}f} * {a}" for a, c in self.terms]
        return f"{self.target} =\n\n" + "".join(
            f"  {p} +\n" for p in parts) + f"  {self.intercept:.{decimals}f}"


def _cholesky_solve(A: np.ndarray, b: np.ndarray):
    """Solve SPD ``A x = b``; returns None when a pivot is too small."""
    p = A.shape[0]
    L = np.zeros_like(A)
    tol = _PIVOT_RTOL * float(np.max(np.diag(A)))
    for k in range(p):
        piv = A[k, k] - L[k, :k] @ L[k, :k]
        if not piv > tol:
            return None
        L[k, k] = math.sqrt(piv)
        for i in range(k + 1, p):
            L[i, k] = (A[i, k] - L[i, :k] @ L[k, :k]) / L[k, k]
    z = np.zeros(p)
    for i in range(p):
        z[i] = (b[i] - L[i, :i] @ z[:i]) / L[i, i]
    x = np.zeros(p)
    for i in reversed(range(p)):
        x[i] = (z[i] - L[i + 1:, i] @ x[i + 1:]) / L[i, i]
    return x


def _ols_arrays(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Coefficients and intercept of ``y ~ X`` via centered normal equations."""
    xm = X.mean(axis=0)
    ym = y.mean()
    Xc = X - xm
    yc = y - ym
    A = Xc.T @ Xc
    rhs = Xc.T @ yc
    # Jacobi scaling keeps the pivot test meaningful across column units
    s = np.sqrt(np.diag(A))
    s[s == 0] = 1.0
    As = A / np.outer(s, s)
    w = _cholesky_solve(As, rhs / s)
    if w is None:
        p = A.shape[0]
        lam = _RIDGE_FACTOR * float(np.trace(A)) / p
        As = (A + lam * np.eye(p)) / np.outer(s, s)
        w = _cholesky_solve(As, rhs / s)
        if w is None:
            raise DegenerateSystemError(
                "normal equations are singular even after ridge regularization")
    w = w / s
    return w, float(ym - w @ xm)


def _check_attrs(d: Dataset, target: str, attrs: Sequence[str]):
    if not attrs:
        raise DataError("at least one attribute is required")
    d.numeric_spec(target)
    for a in attrs:
        d.numeric_spec(a)
        if a == target:
            raise DataError(f"attribute {a!r} is the target")
    if len(set(attrs)) != len(attrs):
        raise DataError("attributes must be distinct")


def fit_ols(d: Dataset, target: str, attrs: Sequence[str]) -> LinearModel:
    _check_attrs(d, target, attrs)
    if d.n < 2:
        raise DegenerateSystemError("least squares needs at least 2 instances")
    w, b = _ols_arrays(d.matrix(attrs), d.column(target))
    return LinearModel(target, tuple(zip(attrs, map(float, w))), b)


def predict_linear(m: LinearModel, instance: Mapping[str, float]) -> float:
    total = m.intercept
    for a, c in m.terms:
        try:
            total += c * float(instance[a])
        except KeyError:
            raise DataError(f"instance lacks model attribute {a!r}") from None
    return total


def _sse(X, y, cols) -> float:
    w, b = _ols_arrays(X[:, cols], y)
    r = y - X[:, cols] @ w - b
    return float(r @ r)


class _Scorer:
    def __init__(self, X, y, criterion):
        if criterion not in CRITERIA:
            raise DataError(f"unknown criterion {criterion!r}; expected one of {CRITERIA}")
        self.X, self.y, self.criterion = X, y, criterion
        self.n, self.p = X.shape
        self.cache = {}
        self.floor = 1e-300
        self.sse_full = max(self.sse(tuple(range(self.p))), self.floor)

    def sse(self, cols):
        if cols not in self.cache:
            self.cache[cols] = _sse(self.X, self.y, list(cols))
        return self.cache[cols]

    def __call__(self, cols) -> float:
        cols = tuple(sorted(cols))
        sse = max(self.sse(cols), self.floor)
        k = len(cols)
        if self.criterion == "loglik":
            return self.n * math.log(sse / self.n) + 2 * (k + 1)
        return sse / self.sse_full * (self.n - self.p - 1) + 2 * (k + 1)


def select_attributes_aic(d: Dataset, target: str, candidates: Sequence[str],
                          mode: str = "exhaustive", criterion: str = "ratio") -> list[str]:
    """Pick a subset of ``candidates`` minimizing the Akaike score.

    Returns the attributes in candidate order.
    """
    if mode not in SELECTIONS[1:]:
        raise DataError(f"unknown selection mode {mode!r}")
    _check_attrs(d, target, candidates)
    p = len(candidates)
    if mode == "exhaustive" and p > EXHAUSTIVE_LIMIT:
        raise GuardExceededError(
            f"exhaustive selection over {p} candidates exceeds the limit of {EXHAUSTIVE_LIMIT}")
    if p == 1:
        return list(candidates)
    X = d.matrix(candidates)
    y = d.column(target)
    score = _Scorer(X, y, criterion)

    if mode == "exhaustive":
        best = None
        for k in range(1, p + 1):
            for cols in itertools.combinations(range(p), k):
                key = (score(cols), k, cols)
                if best is None or key < best:
                    best = key
        chosen = best[2]
    elif mode == "greedy":
        chosen = list(range(p))
        current = score(chosen)
        while len(chosen) > 1:
            trials = [(score([c for c in chosen if c != r]), r) for r in chosen]
            s, r = min(trials)
            if s >= current:
                break
            chosen.remove(r)
            current = s
    else:
        chosen = list(range(p))
        current = score(chosen)
        sd = X.std(axis=0, ddof=1)
        ysd = float(y.std(ddof=1)) or 1.0
        while len(chosen) > 1:
            w, _ = _ols_arrays(X[:, chosen], y)
            std_coef = [abs(w[i] * sd[c] / ysd) for i, c in enumerate(chosen)]
            r = chosen[int(np.argmin(std_coef))]
            trial = [c for c in chosen if c != r]
            s = score(trial)
            if s >= current:
                break
            chosen = trial
            current = s
    return [candidates[i] for i in sorted(chosen)]


def fit_linreg(d: Dataset, target: str, candidates: Sequence[str],
               selection: str = "none", criterion: str = "ratio") -> LinearModel:
    if selection not in SELECTIONS:
        raise DataError(f"unknown selection {selection!r}; expected one of {SELECTIONS}")
    attrs = list(candidates)
    if selection != "none":
        attrs = select_attributes_aic(d, target, attrs, selection, criterion)
    return fit_ols(d, target, attrs)
