"""Plain-text persistence for linear and SVR models.

Example::

    # regrkit model v1
    type: svr
    target: Page_Views
    filter: normalize
    filter_param: Subscribers_total 1000 145000
    coef: Subscribers_total 0.5104
    intercept: 0.0318
    params: C=1 epsilon=0.001 tol=0.001

Attribute names may contain spaces (values are split from the right).
Unknown keys are rejected on load.
"""

from __future__ import annotations

import math

from .errors import ModelFormatError
from .filters import FILTER_KINDS, NONE, FilterModel
from .ingest import format_number
from .linreg import LinearModel
from .smoreg import SvrModel, SvrParams

MAGIC = "# regrkit model v1"
_KEYS = ("type", "target", "filter", "filter_param", "coef", "intercept", "params")
_PARAM_KEYS = {"C": "C", "epsilon": "epsilon", "tol": "tolerance"}


def dumps(m) -> str:
    fmt = format_number
    if isinstance(m, LinearModel):
        kind, filt, coefs, icpt, params = "linear", FilterModel(), m.terms, m.intercept, None
    elif isinstance(m, SvrModel):
        kind, filt, icpt, params = "svr", m.filter, m.bias, m.params
        coefs = tuple(zip(m.attributes, m.weights))
    else:
        raise TypeError(f"cannot serialize {type(m).__name__}")
    lines = [MAGIC, f"type: {kind}", f"target: {m.target}", f"filter: {filt.kind}"]
    for name, (a, b) in filt.params.items():
        lines.append(f"filter_param: {name} {fmt(a)} {fmt(b)}")
    for name, c in coefs:
        lines.append(f"coef: {name} {fmt(c)}")
    lines.append(f"intercept: {fmt(icpt)}")
    if params is not None:
        lines.append(f"params: C={fmt(params.C)} epsilon={fmt(params.epsilon)} "
                     f"tol={fmt(params.tolerance)}")
    return "\n".join(lines) + "\n"


def _number(text: str, lineno: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ModelFormatError(f"line {lineno}: {text!r} is not a number") from None
    if not math.isfinite(v):
        raise ModelFormatError(f"line {lineno}: non-finite number {text!r}")
    return v


def _split_named(value: str, count: int, lineno: int):
    parts = value.rsplit(None, count)
    if len(parts) != count + 1 or not parts[0]:
        raise ModelFormatError(f"line {lineno}: expected a name and {count} number(s)")
    return parts[0], [_number(p, lineno) for p in parts[1:]]


def loads(text: str):
    lines = text.split("\n")
    if not lines or lines[0].rstrip("\r") != MAGIC:
        raise ModelFormatError(f"missing header line {MAGIC!r}")
    fields: dict = {"filter_param": [], "coef": []}
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        key, sep, value = line.partition(":")
        key, value = key.strip(), value.strip()
        if not sep or key not in _KEYS:
            raise ModelFormatError(f"line {lineno}: unknown key {key!r}")
        if key == "filter_param":
            name, (a, b) = _split_named(value, 2, lineno)
            fields[key].append((name, (a, b)))
        elif key == "coef":
            name, (c,) = _split_named(value, 1, lineno)
            fields[key].append((name, c))
        elif key in fields:
            raise ModelFormatError(f"line {lineno}: duplicate key {key!r}")
        elif key == "intercept":
            fields[key] = _number(value, lineno)
        elif key == "params":
            kw = {}
            for tok in value.split():
                k, eq, v = tok.partition("=")
                if not eq or k not in _PARAM_KEYS:
                    raise ModelFormatError(f"line {lineno}: unknown parameter {tok!r}")
                kw[_PARAM_KEYS[k]] = _number(v, lineno)
            fields[key] = kw
        else:
            fields[key] = value

    for req in ("type", "target", "intercept"):
        if req not in fields:
            raise ModelFormatError(f"missing required key {req!r}")
    if not fields["coef"]:
        raise ModelFormatError("model has no coef lines")
    kind = fields["type"]
    filt_kind = fields.get("filter", NONE)
    if filt_kind not in FILTER_KINDS:
        raise ModelFormatError(f"unknown filter {filt_kind!r}")
    names = [n for n, _ in fields["coef"]]
    if len(set(names)) != len(names):
        raise ModelFormatError("duplicate coef attribute")

    if kind == "linear":
        if filt_kind != NONE or fields["filter_param"]:
            raise ModelFormatError("linear models carry no filter")
        if "params" in fields:
            raise ModelFormatError("linear models carry no solver params")
        return LinearModel(fields["target"], tuple(fields["coef"]), fields["intercept"])
    if kind != "svr":
        raise ModelFormatError(f"unknown model type {kind!r}")
    if filt_kind == NONE and fields["filter_param"]:
        raise ModelFormatError("filter_param lines given for filter 'none'")
    params = dict(fields["filter_param"])
    if filt_kind != NONE:
        lacking = [n for n in names if n not in params]
        if lacking:
            raise ModelFormatError(f"no filter_param for {', '.join(lacking)}")
    try:
        svr_params = SvrParams(**fields.get("params", {}))
    except Exception as e:
        raise ModelFormatError(f"bad params: {e}") from None
    return SvrModel(fields["target"], tuple(names), tuple(c for _, c in fields["coef"]),
                    fields["intercept"], FilterModel(filt_kind, params), svr_params)


def save_model(m, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(m))


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
