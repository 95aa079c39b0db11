"""Correlation-based feature subset selection (CFS).

Subsets are scored by

    merit = sum w_a |r(a, class)| / sqrt(sum w_a^2 + 2 sum_{a<b} w_a w_b |r(a, b)|)

With unit weights this is the textbook ``k r_cf / sqrt(k + k (k - 1) r_ff)``.
The ``sd`` weighting (the default) uses each attribute's standard
deviation; the merit is then the correlation between the class and the
plain sum of the subset's columns (when all correlations are positive).

Subsets are searched best-first from the empty set. After the search,
attributes that are "locally predictive" (more correlated with the class
than with any attribute already chosen) are added back.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .core import CorrelationMatrix, Dataset, correlation_matrix
from .errors import DataError

# below this many candidates the default search runs until the open list is
# empty, which makes it agree with exhaustive enumeration
COMPLETE_SEARCH_MAX = 10
DEFAULT_STALE_LIMIT = 5
WEIGHTINGS = ("sd", "unit")


def cfs_merit(corr: CorrelationMatrix, subset: Sequence[str], target: str,
              weights: Mapping[str, float] | None = None) -> float:
    k = len(subset)
    if k == 0:
        return 0.0
    if weights is None:
        rcf = sum(abs(corr.r(a, target)) for a in subset) / k
        if k == 1:
            return rcf
        pairs = list(itertools.combinations(subset, 2))
        rff = sum(abs(corr.r(a, b)) for a, b in pairs) / len(pairs)
        return k * rcf / math.sqrt(k + k * (k - 1) * rff)
    num = sum(weights[a] * abs(corr.r(a, target)) for a in subset)
    den = sum(weights[a] ** 2 for a in subset) + 2 * sum(
        weights[a] * weights[b] * abs(corr.r(a, b))
        for a, b in itertools.combinations(subset, 2))
    return num / math.sqrt(den)


def merit_weights(d: Dataset, names: Sequence[str], weighting: str):
    """Per-attribute weights for :func:`cfs_merit` (None means unit weights)."""
    if weighting not in WEIGHTINGS:
        raise DataError(f"unknown merit weighting {weighting!r}; expected one of {WEIGHTINGS}")
    if weighting == "unit":
        return None
    return {a: float(d.column(a).std()) for a in names}


@dataclass(frozen=True)
class CfsResult:
    selected: tuple[str, ...]
    merit: float
    indices: tuple[int, ...]
    search_subset: tuple[str, ...] = ()
    search_merit: float = 0.0
    weighting: str = "sd"
    trace: tuple = field(default=(), repr=False)


def default_stale_limit(n_candidates: int) -> int:
    if n_candidates <= COMPLETE_SEARCH_MAX:
        return max(DEFAULT_STALE_LIMIT, 2 ** n_candidates)
    return DEFAULT_STALE_LIMIT


def best_first_search(corr: CorrelationMatrix, candidates: Sequence[str], target: str,
                      stale_limit: int | None = None, trace: list | None = None,
                      weights: Mapping[str, float] | None = None):
    """Forward best-first search; returns ``(subset, merit)``.

    Stops after ``stale_limit`` consecutive expansions that fail to improve
    the best merit seen. Subsets are reported in candidate order.
    """
    if not candidates:
        raise DataError("best-first search needs at least one candidate")
    if stale_limit is None:
        stale_limit = default_stale_limit(len(candidates))
    order = {a: i for i, a in enumerate(candidates)}

    start: tuple[int, ...] = ()
    best_key = start
    best_merit = 0.0
    open_list = [(0.0, start)]
    seen = {start}
    stale = 0
    while open_list and stale < stale_limit:
        # highest merit first; ties go to smaller, then lower-indexed subsets
        open_list.sort(key=lambda e: (-e[0], len(e[1]), e[1]))
        _, node = open_list.pop(0)
        improved = False
        for a in candidates:
            ia = order[a]
            if ia in node:
                continue
            child = tuple(sorted(node + (ia,)))
            if child in seen:
                continue
            seen.add(child)
            names = [candidates[i] for i in child]
            m = cfs_merit(corr, names, target, weights)
            if trace is not None:
                trace.append((tuple(names), m))
            open_list.append((m, child))
            if m > best_merit:
                best_merit, best_key = m, child
                improved = True
        stale = 0 if improved else stale + 1
    return [candidates[i] for i in best_key], best_merit


def add_locally_predictive(corr: CorrelationMatrix, selected: Sequence[str],
                           candidates: Sequence[str], target: str) -> list[str]:
    chosen = list(selected)
    rest = [a for a in candidates if a not in chosen]
    rest.sort(key=lambda a: (-abs(corr.r(a, target)), candidates.index(a)))
    for a in rest:
        rc = abs(corr.r(a, target))
        redundancy = max((abs(corr.r(a, s)) for s in chosen), default=0.0)
        if rc > redundancy:
            chosen.append(a)
    return chosen


def cfs_select(d: Dataset, target: str, stale_limit: int | None = None,
               locally_predictive: bool = True, weighting: str = "sd") -> CfsResult:
    """Run CFS on the numeric attributes of ``d`` against ``target``.

    ``indices`` are 1-based positions among the numeric attributes, so a
    leading text column (e.g. the month) does not shift them.
    """
    d.numeric_spec(target)
    numeric = d.numeric_names
    candidates = [a for a in numeric if a != target]
    if not candidates:
        raise DataError("CFS needs at least one non-target numeric attribute")
    weights = merit_weights(d, candidates, weighting)
    corr = correlation_matrix(d)
    trace: list = []
    found, merit = best_first_search(corr, candidates, target, stale_limit, trace, weights)
    final = found
    if locally_predictive:
        final = add_locally_predictive(corr, found, candidates, target)
    final = [a for a in candidates if a in final]
    return CfsResult(
        selected=tuple(final),
        merit=cfs_merit(corr, final, target, weights),
        indices=tuple(numeric.index(a) + 1 for a in final),
        search_subset=tuple(found),
        search_merit=merit,
        weighting=weighting,
        trace=tuple(trace),
    )


def format_selection(result: CfsResult, d: Dataset, target: str,
                     locally_predictive: bool = True) -> str:
    idx = ",".join(str(i) for i in result.indices)
    class_idx = d.numeric_names.index(target) + 1
    lines = [
        "Attribute Subset Evaluator (supervised, Class (numeric): "
        f"{class_idx} {target}):",
        "\tCFS Subset Evaluator",
    ]
    if locally_predictive:
        lines.append("\tIncluding locally predictive attributes")
    lines += [
        "",
        f"Selected attributes: {idx} : {len(result.indices)}",
    ]
    lines += [f"                     {a}" for a in result.selected]
    lines.append(f"Merit of selected subset: {result.merit:.4f}")
    return "\n".join(lines) + "\n"
