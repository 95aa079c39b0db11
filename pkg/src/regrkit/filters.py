"""Min-max normalization and z-score standardization with exact inverses."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import Dataset, column_stats
from .errors import (
    AttributeMismatchError,
    ConstantColumnError,
    DataError,
    EmptyDatasetError,
    UnknownAttributeError,
)

NONE = "none"
NORMALIZE = "normalize"
STANDARDIZE = "standardize"
FILTER_KINDS = (NONE, NORMALIZE, STANDARDIZE)


@dataclass(frozen=True)
class FilterModel:
    """Per-attribute scaling parameters.

    ``params[name]`` is ``(min, max)`` for normalize and ``(mean, stddev)``
    for standardize. Both are stored as an offset and a scale so a value
    maps to ``(x - offset) / scale``.
    """

    kind: str = NONE
    params: dict = field(default_factory=dict)

    def offset_scale(self, name: str) -> tuple[float, float]:
        if self.kind == NONE:
            return 0.0, 1.0
        try:
            a, b = self.params[name]
        except KeyError:
            raise UnknownAttributeError(name) from None
        if self.kind == NORMALIZE:
            return a, b - a
        return a, b

    def covers(self, name: str) -> bool:
        return self.kind == NONE or name in self.params

    def transform(self, name: str, values):
        off, scale = self.offset_scale(name)
        if self.kind == NONE:
            return values
        return (np.asarray(values, dtype=float) - off) / scale

    def inverse(self, name: str, values):
        off, scale = self.offset_scale(name)
        if self.kind == NONE:
            return values
        return off + np.asarray(values, dtype=float) * scale


def fit_filter(d: Dataset, kind: str, attrs: Sequence[str]) -> FilterModel:
    if kind not in FILTER_KINDS:
        raise DataError(f"unknown filter kind {kind!r}; expected one of {FILTER_KINDS}")
    for a in attrs:
        d.numeric_spec(a)
    if kind == NONE:
        return FilterModel(NONE, {})
    if d.n < 2:
        raise EmptyDatasetError("fitting a filter needs at least 2 instances")
    params = {}
    for a in attrs:
        st = column_stats(d, a)
        if kind == NORMALIZE:
            if not st.max > st.min:
                raise ConstantColumnError(a, "cannot normalize")
            params[a] = (st.min, st.max)
        else:
            if not st.stddev > 0:
                raise ConstantColumnError(a, "cannot standardize")
            params[a] = (st.mean, st.stddev)
    return FilterModel(kind, params)


def apply_filter(f: FilterModel, d: Dataset) -> Dataset:
    if f.kind == NONE:
        return d
    missing = [a for a in f.params if a not in d.names]
    if missing:
        raise AttributeMismatchError(
            f"dataset lacks filtered attribute(s): {', '.join(missing)}")
    return d.replace_columns({a: f.transform(a, d.column(a)) for a in f.params})


def invert_target(f: FilterModel, target: str, v):
    """Map a filtered-space value of ``target`` back to raw units."""
    if f.kind == NONE:
        return v
    out = f.inverse(target, v)
    return float(out) if np.ndim(out) == 0 else out
