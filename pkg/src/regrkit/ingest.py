"""Raw-export ingestion and ARFF reading/writing.

Raw analytics exports carry unit-suffixed cells such as ``"$2,500"`` or
``"1,150k"``; :func:`parse_quantity` turns those into plain numbers.
ARFF support is limited to numeric and string attributes.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Sequence

from .core import LABEL, NUMERIC, AttributeSpec, Dataset, build_dataset
from .errors import (
    ArffSyntaxError,
    ArityError,
    DataError,
    HeaderError,
    MalformedQuantityError,
    MissingValueError,
    UnknownAttributeError,
    UnsupportedTypeError,
)

_QUANTITY = re.compile(r"\$?(\d{1,3}(?:,\d{3})+|\d+)(\.\d+)?([kK])?")
_DECIMAL = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_BARE = re.compile(r"[A-Za-z0-9_.+\-/]+")

NUMERIC_TYPES = ("numeric", "real", "integer")


def parse_quantity(token: str) -> float:
    """Parse a unit-suffixed quantity: ``"1k"`` -> 1000, ``"$2,500"`` -> 2500."""
    m = _QUANTITY.fullmatch(token.strip())
    if m is None:
        raise MalformedQuantityError(token)
    digits, frac, k = m.groups()
    value = Decimal(digits.replace(",", "") + (frac or ""))
    if k:
        value *= 1000
    return float(value)


def ingest_csv(text: str, label_columns: Sequence[str] = ()) -> Dataset:
    """Read a raw export, parse quantities and drop exact duplicate rows.

    The first non-blank line is the header. Columns listed in
    ``label_columns`` are kept as text; every other cell must be a
    quantity. A row equal (after parsing) to an earlier row is dropped.
    """
    reader = csv.reader(io.StringIO(text))
    header = None
    for row in reader:
        if any(c.strip() for c in row):
            header = [c.strip() for c in row]
            break
    if header is None:
        raise HeaderError("input has no header row")
    if any(not h for h in header):
        raise HeaderError("header contains an empty column name")
    dupes = sorted({h for h in header if header.count(h) > 1})
    if dupes:
        raise HeaderError(f"duplicate column names in header: {', '.join(dupes)}")
    for lc in label_columns:
        if lc not in header:
            raise UnknownAttributeError(lc)

    labels = set(label_columns)
    specs = [AttributeSpec(h, LABEL if h in labels else NUMERIC, i)
             for i, h in enumerate(header)]
    rows, seen = [], set()
    for row in reader:
        if not any(c.strip() for c in row):
            continue
        line = reader.line_num
        if len(row) != len(header):
            raise DataError(
                f"row {line} has {len(row)} fields, header has {len(header)}")
        parsed = []
        for spec, cell in zip(specs, row):
            if spec.kind == LABEL:
                parsed.append(cell.strip())
                continue
            try:
                parsed.append(parse_quantity(cell))
            except MalformedQuantityError:
                raise MalformedQuantityError(cell, row=line, column=spec.name) from None
        key = tuple(parsed)
        if key in seen:
            continue
        seen.add(key)
        rows.append(key)
    return build_dataset(specs, rows)


# --- ARFF ---------------------------------------------------------------------

@dataclass(frozen=True)
class ArffDocument:
    relation: str
    dataset: Dataset


_ESCAPES = {"n": "\n", "r": "\r", "t": "\t"}


def _read_token(s: str, pos: int, stop: str, line: int) -> tuple[str, bool, int]:
    """Read one token from ``s`` at ``pos``; returns (text, quoted, next_pos).

    Unquoted tokens run until a character in ``stop``.
    """
    n = len(s)
    while pos < n and s[pos] in " \t":
        pos += 1
    if pos < n and s[pos] in "'\"":
        q = s[pos]
        pos += 1
        buf = []
        while True:
            if pos >= n:
                raise ArffSyntaxError("unterminated quoted string", line)
            c = s[pos]
            if c == "\\" and pos + 1 < n:
                nxt = s[pos + 1]
                buf.append(_ESCAPES.get(nxt, nxt))
                pos += 2
                continue
            if c == q:
                pos += 1
                break
            buf.append(c)
            pos += 1
        while pos < n and s[pos] in " \t":
            pos += 1
        return "".join(buf), True, pos
    start = pos
    while pos < n and s[pos] not in stop:
        pos += 1
    return s[start:pos].strip(), False, pos


def _split_row(s: str, line: int) -> list[tuple[str, bool]]:
    fields = []
    pos = 0
    while True:
        tok, quoted, pos = _read_token(s, pos, ",", line)
        fields.append((tok, quoted))
        if pos >= len(s):
            return fields
        if s[pos] != ",":
            raise ArffSyntaxError(f"unexpected character {s[pos]!r} after quoted value", line)
        pos += 1


def read_arff(text: str) -> ArffDocument:
    relation = None
    specs: list[AttributeSpec] = []
    rows = []
    in_data = False
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        if not in_data:
            if not stripped.startswith("@"):
                raise ArffSyntaxError(f"expected a declaration, got {stripped[:30]!r}", lineno)
            keyword = stripped.split(None, 1)[0].lower()
            rest = stripped[len(keyword):]
            if keyword == "@relation":
                if relation is not None:
                    raise ArffSyntaxError("duplicate @relation", lineno)
                name, _, pos = _read_token(rest, 0, " \t", lineno)
                if not name or rest[pos:].strip():
                    raise ArffSyntaxError("malformed @relation", lineno)
                relation = name
            elif keyword == "@attribute":
                if relation is None:
                    raise ArffSyntaxError("@attribute before @relation", lineno)
                name, _, pos = _read_token(rest, 0, " \t", lineno)
                typ = rest[pos:].strip()
                if not name or not typ:
                    raise ArffSyntaxError("malformed @attribute", lineno)
                low = typ.lower()
                if low in NUMERIC_TYPES:
                    kind = NUMERIC
                elif low == "string":
                    kind = LABEL
                elif low.startswith("{") or low.split()[0] in ("date", "relational"):
                    raise UnsupportedTypeError(
                        f"attribute {name!r}: unsupported type {typ!r}", lineno)
                else:
                    raise ArffSyntaxError(f"attribute {name!r}: unknown type {typ!r}", lineno)
                if any(s.name == name for s in specs):
                    raise ArffSyntaxError(f"duplicate attribute {name!r}", lineno)
                specs.append(AttributeSpec(name, kind, len(specs)))
            elif keyword == "@data":
                if relation is None:
                    raise ArffSyntaxError("@data before @relation", lineno)
                if not specs:
                    raise ArffSyntaxError("@data before any @attribute", lineno)
                in_data = True
            else:
                raise ArffSyntaxError(f"unknown declaration {keyword!r}", lineno)
            continue

        if stripped.startswith("@"):
            raise ArffSyntaxError("declaration inside the data section", lineno)
        if stripped.startswith("{"):
            raise UnsupportedTypeError("sparse data rows are not supported", lineno)
        fields = _split_row(line, lineno)
        if len(fields) != len(specs):
            raise ArityError(
                f"data row has {len(fields)} fields, expected {len(specs)}", lineno)
        row = []
        for spec, (tok, quoted) in zip(specs, fields):
            if tok == "?" and not quoted:
                raise MissingValueError(
                    f"missing value for attribute {spec.name!r}", lineno)
            if spec.kind == NUMERIC:
                if quoted or not _DECIMAL.fullmatch(tok):
                    raise ArffSyntaxError(
                        f"attribute {spec.name!r}: {tok!r} is not a number", lineno)
                v = float(tok)
                if not math.isfinite(v):
                    raise ArffSyntaxError(f"attribute {spec.name!r}: value out of range", lineno)
                row.append(v)
            else:
                row.append(tok)
        rows.append(row)

    if relation is None:
        raise ArffSyntaxError("missing @relation")
    if not in_data:
        raise ArffSyntaxError("missing @data section")
    return ArffDocument(relation, build_dataset(specs, rows))


def parse_arff(text: str) -> Dataset:
    return read_arff(text).dataset


def format_number(x: float) -> str:
    """Shortest text that reads back as exactly ``x``."""
    if x == 0.0 and math.copysign(1.0, x) < 0:
        return "-0.0"
    if x.is_integer() and abs(x) < 2 ** 53:
        return str(int(x))
    return repr(x)


def _quote(s: str) -> str:
    if s and s != "?" and _BARE.fullmatch(s):
        return s
    out = (s.replace("\\", "\\\\").replace("'", "\\'")
           .replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t"))
    return f"'{out}'"


def write_arff(d: Dataset, relation_name: str) -> str:
    lines = [f"@relation {_quote(relation_name)}", ""]
    for a in d.attributes:
        typ = "numeric" if a.kind == NUMERIC else "string"
        lines.append(f"@attribute {_quote(a.name)} {typ}")
    lines += ["", "@data"]
    kinds = [a.kind for a in d.attributes]
    for row in d.rows:
        lines.append(",".join(format_number(v) if k == NUMERIC else _quote(v)
                              for k, v in zip(kinds, row)))
    return "\n".join(lines) + "\n"


def _positional(x: float) -> str:
    # no exponent, so the output stays inside the quantity grammar
    s = format(Decimal(repr(x)), "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return s


def write_csv(d: Dataset) -> str:
    """Canonical CSV form of a dataset (plain numbers, header row)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(d.names)
    kinds = [a.kind for a in d.attributes]
    for row in d.rows:
        w.writerow([_positional(v) if k == NUMERIC else v for k, v in zip(kinds, row)])
    return buf.getvalue()
