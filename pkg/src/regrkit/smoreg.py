"""Linear-kernel epsilon-insensitive support vector regression, trained by SMO.

The dual is kept in the single-variable form ``beta_i = alpha_i - alpha_i*``::

    maximize   -1/2 sum_ij beta_i beta_j <x_i, x_j> - eps * sum_i |beta_i| + sum_i y_i beta_i
    subject to sum_i beta_i = 0,  -C <= beta_i <= C

Each pair update moves ``beta_i`` up and ``beta_j`` down by the same amount,
chosen by an exact line search over the piecewise-quadratic objective, so
the equality constraint holds throughout and the objective never drops.
The pair is the maximal KKT-violating one.

On badly scaled inputs (raw page-view counts are ~1e6) plain pair updates
converge very slowly, so every few sweeps the solver also takes
active-set steps: with the sign/bound pattern frozen, the objective on that
face is a concave quadratic, and we move toward its maximizer (or along a
flat ascent direction) until a variable reaches zero or a bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .core import Dataset
from .errors import (
    AttributeMismatchError,
    DataError,
    DegenerateSystemError,
    MonotonicityError,
    NonConvergenceError,
)
from .filters import NONE, NORMALIZE, FilterModel, fit_filter


@dataclass(frozen=True)
class SvrParams:
    C: float = 1.0
    epsilon: float = 1e-3
    tolerance: float = 1e-3
    max_updates: int = 1_000_000

    def __post_init__(self):
        if not self.C > 0:
            raise DataError(f"C must be positive, got {self.C}")
        if not self.epsilon >= 0:
            raise DataError(f"epsilon must be non-negative, got {self.epsilon}")
        if not self.tolerance > 0:
            raise DataError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_updates < 1:
            raise DataError("max_updates must be a positive integer")


@dataclass(frozen=True)
class SvrModel:
    target: str
    attributes: tuple[str, ...]
    weights: tuple[float, ...]
    bias: float
    filter: FilterModel
    params: SvrParams
    duals: tuple[float, ...] | None = None
    updates: int = 0

    def weight(self, attr: str) -> float:
        return self.weights[self.attributes.index(attr)]


@dataclass
class DualSolution:
    beta: np.ndarray
    bias: float
    violation: float
    updates: int


def dual_objective(beta, K, y, epsilon) -> float:
    return float(-0.5 * beta @ K @ beta - epsilon * np.abs(beta).sum() + y @ beta)


def _sum_zero_basis(m: int) -> np.ndarray:
    """Orthonormal basis (m x m-1) of the vectors whose entries sum to 0."""
    M = np.eye(m)
    M[:, 0] = 1.0
    Q, _ = np.linalg.qr(M)
    return Q[:, 1:]


class _Smo:
    def __init__(self, K, y, C, eps, tol, max_updates, callback):
        self.K = K
        self.y = y
        self.C = C
        self.eps = eps
        self.tol = tol
        self.max_updates = max_updates
        self.callback = callback
        self.n = y.size
        self.beta = np.zeros(self.n)
        self.E = y.copy()  # y - K beta
        self.updates = 0

    # -- KKT bookkeeping -----------------------------------------------------

    def _bounds(self):
        """Masked up/down scores; a pair (i up, j down) improves iff up_i > down_j."""
        b, E, eps, C = self.beta, self.E, self.eps, self.C
        up = np.where(b >= 0, E - eps, E + eps)
        dn = np.where(b <= 0, E + eps, E - eps)
        up = np.where(b < C, up, -np.inf)
        dn = np.where(b > -C, dn, np.inf)
        return up, dn

    def refresh(self):
        self.E = self.y - self.K @ self.beta

    def bias_and_gap(self):
        up, dn = self._bounds()
        hi, lo = float(up.max()), float(dn.min())
        if math.isinf(hi) and math.isinf(lo):
            b = 0.0
        elif math.isinf(hi):
            b = lo
        elif math.isinf(lo):
            b = hi
        else:
            b = 0.5 * (hi + lo)
        return b, max(hi - lo, 0.0) if not (math.isinf(hi) or math.isinf(lo)) else 0.0

    # -- updates ---------------------------------------------------------------

    def _notify(self):
        self.updates += 1
        if self.callback is not None:
            self.callback(self.beta, self)

    def pair_step(self, i: int, j: int) -> bool:
        K, C, eps = self.K, self.C, self.eps
        bi, bj = self.beta[i], self.beta[j]
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        d = self.E[i] - self.E[j]
        lo = max(-C - bi, bj - C)
        hi = min(C - bi, bj + C)
        pts = {lo, hi, 0.0}
        for bp in (-bi, bj):
            if lo < bp < hi:
                pts.add(bp)
        pts = sorted(p for p in pts if lo <= p <= hi)

        base = abs(bi) + abs(bj)

        def phi(t):
            return d * t - 0.5 * eta * t * t - eps * (abs(bi + t) + abs(bj - t) - base)

        cands = list(pts)
        if eta > 0:
            for a, b in zip(pts[:-1], pts[1:]):
                mid = 0.5 * (a + b)
                si = math.copysign(1.0, bi + mid) if bi + mid != 0 else 0.0
                sj = math.copysign(1.0, bj - mid) if bj - mid != 0 else 0.0
                t = (d - eps * si + eps * sj) / eta
                cands.append(min(max(t, a), b))
        t = max(cands, key=lambda t: (phi(t), -abs(t)))
        if t == 0.0 or not phi(t) > 0.0:
            return False

        ni, nj = bi + t, bj - t
        snapped_i = snapped_j = False
        if t == C - bi:
            ni, snapped_i = C, True
        elif t == -C - bi:
            ni, snapped_i = -C, True
        elif t == -bi:
            ni, snapped_i = 0.0, True
        if t == bj + C:
            nj, snapped_j = -C, True
        elif t == bj - C:
            nj, snapped_j = C, True
        elif t == bj:
            nj, snapped_j = 0.0, True
        if snapped_i and not snapped_j:
            nj = bi + bj - ni
        elif snapped_j and not snapped_i:
            ni = bi + bj - nj
        ni = min(max(ni, -C), C)
        nj = min(max(nj, -C), C)
        if ni == bi and nj == bj:
            return False

        di, dj = ni - bi, nj - bj
        self.beta[i], self.beta[j] = ni, nj
        self.E -= di * K[:, i] + dj * K[:, j]
        self._notify()
        return True

    def face_step(self) -> bool:
        """One active-set step on the current face; False when nothing moved."""
        beta, C, eps = self.beta, self.C, self.eps
        F = np.flatnonzero((beta != 0.0) & (np.abs(beta) < C))
        m = F.size
        if m < 2:
            return False
        s = np.sign(beta[F])
        g = self.E[F] - eps * s
        Z = _sum_zero_basis(m)
        H = Z.T @ self.K[np.ix_(F, F)] @ Z
        gz = Z.T @ g
        evals, evecs = np.linalg.eigh(H)
        top = max(float(evals.max()), 0.0)
        flat = evals <= 1e-12 * top if top > 0 else np.ones_like(evals, dtype=bool)
        null = evecs[:, flat]
        gn = null @ (null.T @ gz)
        gz_norm = float(np.linalg.norm(gz))
        if gz_norm == 0.0:
            return False
        if np.linalg.norm(gn) > 1e-9 * gz_norm:
            dz, newton = gn, False
        else:
            rng = ~flat
            dz = evecs[:, rng] @ ((evecs[:, rng].T @ gz) / evals[rng])
            newton = True
        step = Z @ dz
        if not np.any(step):
            return False

        tmax = 1.0 if newton else math.inf
        block = -1
        for k in range(m):
            dk = step[k]
            if dk == 0.0:
                continue
            i = F[k]
            lim = (C * s[k] - beta[i]) / dk if dk * s[k] > 0 else -beta[i] / dk
            if lim < tmax:
                tmax, block = lim, k
        if not tmax > 0.0 or math.isinf(tmax):
            return False

        old = dual_objective(beta, self.K, self.y, eps)
        new_beta = beta.copy()
        new_beta[F] = beta[F] + tmax * step
        if block >= 0:
            i = F[block]
            new_beta[i] = C * s[block] if step[block] * s[block] > 0 else 0.0
        # redistribute round-off so the equality constraint stays exact
        free = [F[k] for k in range(m) if k != block]
        new_beta[free] -= new_beta.sum() / len(free)
        np.clip(new_beta, -C, C, out=new_beta)
        # a free variable must not cross zero on this face
        for k in range(m):
            i = F[k]
            if k != block and new_beta[i] * s[k] < 0:
                new_beta[i] = 0.0
        new = dual_objective(new_beta, self.K, self.y, eps)
        if new < old - 1e-13 * max(abs(old), 1.0):
            return False
        self.beta = new_beta
        self.refresh()
        self._notify()
        return True

    def refine(self):
        for _ in range(2 * self.n):
            if self.updates >= self.max_updates:
                break
            before = self.beta.copy()
            if not self.face_step():
                break
            F = (before != 0) & (np.abs(before) < self.C)
            F2 = (self.beta != 0) & (np.abs(self.beta) < self.C)
            if np.array_equal(F, F2):
                # full step inside the face: face optimum reached
                break

    # -- driver ------------------------------------------------------------------

    def run(self) -> DualSolution:
        refine_every = max(10, 2 * self.n)
        since = 0
        stuck = False
        while True:
            up, dn = self._bounds()
            i = int(np.argmax(up))
            j = int(np.argmin(dn))
            gap = up[i] - dn[j]
            if gap <= self.tol:
                self.refresh()
                up, dn = self._bounds()
                i = int(np.argmax(up))
                j = int(np.argmin(dn))
                gap = up[i] - dn[j]
                if gap <= self.tol:
                    break
            if self.updates >= self.max_updates:
                raise NonConvergenceError(self.updates, float(gap))
            if since >= refine_every or stuck:
                since = 0
                moved = self.updates
                self.refine()
                self.refresh()
                if stuck and self.updates == moved:
                    raise NonConvergenceError(self.updates, float(gap))
                stuck = False
                continue
            if self.pair_step(i, j):
                since += 1
            else:
                self.refresh()
                stuck = True
        bias, gap = self.bias_and_gap()
        return DualSolution(self.beta.copy(), bias, gap, self.updates)


def solve_svr_dual(X, y, C=1.0, epsilon=1e-3, tol=1e-3, max_updates=1_000_000,
                   callback: Callable | None = None) -> DualSolution:
    """Solve the linear-kernel epsilon-SVR dual on inputs ``X`` and targets ``y``.

    ``callback(beta, state)`` is invoked after every accepted update with the
    current dual vector.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] != y.size:
        raise DataError("X must be n x p with one target per row")
    if y.size < 2:
        raise DegenerateSystemError("SVR needs at least 2 instances")
    K = X @ X.T
    return _Smo(K, y, C, epsilon, tol, max_updates, callback).run()


def _monotone_guard(K, y, epsilon):
    state = {"prev": 0.0}

    def check(beta, _):
        obj = dual_objective(beta, K, y, epsilon)
        prev = state["prev"]
        if obj < prev - 1e-10 * max(abs(prev), 1.0):
            raise MonotonicityError(f"dual objective fell from {prev!r} to {obj!r}")
        state["prev"] = obj

    return check


def fit_smoreg(d: Dataset, target: str, attrs: Sequence[str] | None = None,
               filter_kind: str = NORMALIZE, params: SvrParams | None = None,
               filter_target: bool = True, debug: bool = False,
               callback: Callable | None = None) -> SvrModel:
    """Fit an epsilon-SVR with a linear kernel.

    Inputs and (unless ``filter_target`` is False) the target are scaled by
    the chosen filter before training; weights and bias live in that
    scaled space. ``debug`` checks that every update raises the dual
    objective.
    """
    params = params or SvrParams()
    d.numeric_spec(target)
    if attrs is None:
        attrs = [a for a in d.numeric_names if a != target]
    attrs = list(attrs)
    if not attrs:
        raise DataError("at least one attribute is required")
    for a in attrs:
        d.numeric_spec(a)
        if a == target:
            raise DataError(f"attribute {a!r} is the target")
    if d.n < 2:
        raise DegenerateSystemError("SVR needs at least 2 instances")

    fitted = attrs + [target] if filter_target else attrs
    f = fit_filter(d, filter_kind, fitted)
    X = np.column_stack([f.transform(a, d.column(a)) for a in attrs])
    y = d.column(target)
    if f.covers(target):
        y = np.asarray(f.transform(target, y), dtype=float)

    K = X @ X.T
    cb = callback
    if debug:
        guard = _monotone_guard(K, y, params.epsilon)
        if callback is None:
            cb = guard
        else:
            def cb(beta, state):
                guard(beta, state)
                callback(beta, state)

    sol = _Smo(K, y, params.C, params.epsilon, params.tolerance,
               params.max_updates, cb).run()
    w = sol.beta @ X
    return SvrModel(target, tuple(attrs), tuple(float(v) for v in w), float(sol.bias),
                    f, params, tuple(float(v) for v in sol.beta), sol.updates)


def _filtered_inputs(m: SvrModel, instance: Mapping[str, float]) -> np.ndarray:
    try:
        raw = [float(instance[a]) for a in m.attributes]
    except KeyError as e:
        raise DataError(f"instance lacks model attribute {e.args[0]!r}") from None
    return np.array([float(m.filter.transform(a, v)) for a, v in zip(m.attributes, raw)])


def predict_svr(m: SvrModel, instance: Mapping[str, float]) -> float:
    x = _filtered_inputs(m, instance)
    v = float(np.dot(m.weights, x)) + m.bias
    if m.filter.kind != NONE and m.target in m.filter.params:
        return float(m.filter.inverse(m.target, v))
    return v


def kkt_report(m: SvrModel, d: Dataset) -> float:
    """Largest per-instance violation of the epsilon-SVR optimality conditions."""
    if m.duals is None:
        raise DataError("model carries no dual variables (loaded from file?)")
    if len(m.duals) != d.n:
        raise AttributeMismatchError(
            f"model was trained on {len(m.duals)} instances, dataset has {d.n}")
    missing = [a for a in (*m.attributes, m.target) if a not in d.names]
    if missing:
        raise AttributeMismatchError(f"dataset lacks attribute(s): {', '.join(missing)}")
    X = np.column_stack([m.filter.transform(a, d.column(a)) for a in m.attributes])
    y = d.column(m.target)
    if m.filter.kind != NONE and m.target in m.filter.params:
        y = np.asarray(m.filter.transform(m.target, y), dtype=float)
    r = y - X @ np.asarray(m.weights) - m.bias
    C, eps = m.params.C, m.params.epsilon
    worst = 0.0
    for beta, ri in zip(m.duals, r):
        if beta == 0.0:
            v = abs(ri) - eps
        elif beta >= C:
            v = eps - ri
        elif beta <= -C:
            v = ri + eps
        elif beta > 0:
            v = abs(ri - eps)
        else:
            v = abs(ri + eps)
        worst = max(worst, v)
    return worst
