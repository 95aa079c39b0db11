"""Dataset model, column statistics and Pearson correlation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ConstantColumnError,
    DataError,
    DuplicateAttributeError,
    EmptyDatasetError,
    LabelAttributeError,
    NonFiniteValueError,
    UnknownAttributeError,
    WidthMismatchError,
)

NUMERIC = "numeric"
LABEL = "label"
KINDS = (NUMERIC, LABEL)


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    kind: str = NUMERIC
    index: int = 0


@dataclass(frozen=True)
class Dataset:
    """Immutable table: ordered attribute specs plus full-width rows.

    Build instances through :func:`build_dataset`, which validates them.
    """

    attributes: tuple[AttributeSpec, ...]
    rows: tuple[tuple, ...]

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def names(self) -> list[str]:
        return [a.name for a in self.attributes]

    @property
    def numeric_names(self) -> list[str]:
        return [a.name for a in self.attributes if a.kind == NUMERIC]

    @property
    def label_names(self) -> list[str]:
        return [a.name for a in self.attributes if a.kind == LABEL]

    def spec(self, name: str) -> AttributeSpec:
        for a in self.attributes:
            if a.name == name:
                return a
        raise UnknownAttributeError(name)

    def numeric_spec(self, name: str) -> AttributeSpec:
        a = self.spec(name)
        if a.kind != NUMERIC:
            raise LabelAttributeError(f"attribute {name!r} is a label, not numeric")
        return a

    def column(self, name: str) -> np.ndarray:
        idx = self.numeric_spec(name).index
        return np.array([r[idx] for r in self.rows], dtype=float)

    def labels(self, name: str) -> list[str]:
        idx = self.spec(name).index
        return [r[idx] for r in self.rows]

    def matrix(self, names: Sequence[str]) -> np.ndarray:
        """Numeric columns ``names`` as an ``n x len(names)`` array."""
        idx = [self.numeric_spec(nm).index for nm in names]
        out = np.empty((self.n, len(idx)), dtype=float)
        for i, r in enumerate(self.rows):
            for j, k in enumerate(idx):
                out[i, j] = r[k]
        return out

    def instance(self, i: int) -> dict:
        return {a.name: self.rows[i][a.index] for a in self.attributes}

    def instances(self) -> Iterable[dict]:
        for i in range(self.n):
            yield self.instance(i)

    def replace_columns(self, columns: dict[str, np.ndarray]) -> "Dataset":
        """Copy with the given numeric columns swapped for new values."""
        idx = {self.numeric_spec(k).index: np.asarray(v, dtype=float)
               for k, v in columns.items()}
        rows = []
        for i, r in enumerate(self.rows):
            rows.append(tuple(float(idx[j][i]) if j in idx else v
                              for j, v in enumerate(r)))
        return build_dataset(list(self.attributes), rows)


@dataclass(frozen=True)
class ColumnStats:
    min: float
    max: float
    mean: float
    stddev: float
    n: int


def build_dataset(specs: Sequence[AttributeSpec], rows: Iterable[Sequence]) -> Dataset:
    """Validate ``specs``/``rows`` and return a :class:`Dataset`.

    Spec indices are reassigned from list position. Numeric cells are
    coerced to float and must be finite; label cells are kept as text.
    """
    if not specs:
        raise DataError("at least one attribute is required")
    seen = set()
    attrs = []
    for i, s in enumerate(specs):
        if not s.name:
            raise DataError(f"attribute {i} has an empty name")
        if s.name in seen:
            raise DuplicateAttributeError(f"duplicate attribute name {s.name!r}")
        if s.kind not in KINDS:
            raise DataError(f"attribute {s.name!r} has unknown kind {s.kind!r}")
        seen.add(s.name)
        attrs.append(AttributeSpec(s.name, s.kind, i))

    width = len(attrs)
    out = []
    for r, row in enumerate(rows):
        row = tuple(row)
        if len(row) != width:
            raise WidthMismatchError(r, len(row), width)
        cells = []
        for a, v in zip(attrs, row):
            if a.kind == NUMERIC:
                try:
                    x = float(v)
                except (TypeError, ValueError):
                    raise DataError(
                        f"row {r}, attribute {a.name!r}: {v!r} is not numeric") from None
                if not math.isfinite(x):
                    raise NonFiniteValueError(
                        f"row {r}, attribute {a.name!r}: non-finite value {v!r}")
                cells.append(x)
            else:
                cells.append(str(v))
        out.append(tuple(cells))
    return Dataset(tuple(attrs), tuple(out))


def column_stats(d: Dataset, attr: str) -> ColumnStats:
    x = d.column(attr)
    n = x.size
    if n == 0:
        raise EmptyDatasetError(f"cannot compute statistics of {attr!r} on an empty dataset")
    lo, hi = float(x.min()), float(x.max())
    mean = math.fsum(x) / n
    mean = min(max(mean, lo), hi)
    if n == 1 or lo == hi:
        sd = 0.0
    else:
        sd = math.sqrt(math.fsum((v - mean) ** 2 for v in x) / (n - 1))
    return ColumnStats(lo, hi, mean, sd, n)


def _centered(x: np.ndarray, name: str) -> tuple[np.ndarray, float]:
    c = x - x.mean()
    ss = float(c @ c)
    if ss == 0.0:
        raise ConstantColumnError(name, "correlation undefined")
    return c, ss


def pearson_arrays(x, y, names=("x", "y")) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size:
        raise DataError("correlation needs equal-length vectors")
    if x.size < 2:
        raise EmptyDatasetError("correlation needs at least 2 instances")
    cx, sx = _centered(x, names[0])
    cy, sy = _centered(y, names[1])
    r = float(cx @ cy) / math.sqrt(sx * sy)
    return max(-1.0, min(1.0, r))


def pearson(d: Dataset, a: str, b: str) -> float:
    return pearson_arrays(d.column(a), d.column(b), (a, b))


@dataclass(frozen=True)
class CorrelationMatrix:
    names: tuple[str, ...]
    values: np.ndarray

    def r(self, a: str, b: str) -> float:
        try:
            i, j = self.names.index(a), self.names.index(b)
        except ValueError:
            raise UnknownAttributeError(a if a not in self.names else b) from None
        return float(self.values[i, j])

    def to_csv(self, decimals: int | None = None) -> str:
        def fmt(v):
            if decimals is None:
                return format(v, ".6g")
            return f"{round(v, decimals):.{decimals}f}"

        lines = ["," + ",".join(self.names)]
        for nm, row in zip(self.names, self.values):
            lines.append(nm + "," + ",".join(fmt(float(v)) for v in row))
        return "\n".join(lines) + "\n"


def correlation_matrix(d: Dataset, names: Sequence[str] | None = None) -> CorrelationMatrix:
    """Pairwise Pearson correlations over the numeric attributes, in dataset order."""
    names = list(d.numeric_names if names is None else names)
    if len(names) < 2:
        raise DataError("correlation matrix needs at least 2 numeric attributes")
    if d.n < 2:
        raise EmptyDatasetError("correlation needs at least 2 instances")
    X = d.matrix(names)
    C = X - X.mean(axis=0)
    ss = np.einsum("ij,ij->j", C, C)
    for nm, s in zip(names, ss):
        if s == 0.0:
            raise ConstantColumnError(nm, "correlation undefined for every pair involving it")
    k = len(names)
    R = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            r = float(C[:, i] @ C[:, j]) / math.sqrt(ss[i] * ss[j])
            R[i, j] = R[j, i] = max(-1.0, min(1.0, r))
    return CorrelationMatrix(tuple(names), R)
