"""``regrkit`` command-line front end.

Exit codes: 0 success, 1 usage error, 2 data or I/O error, 3 numerical failure.
Tables go to ``--out`` (or stdout) as CSV; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

from . import modelio
from .cfs import WEIGHTINGS, cfs_select, format_selection
from .core import NUMERIC, column_stats, correlation_matrix
from .errors import DataError, NumericalError
from .filters import FILTER_KINDS
from .ingest import ingest_csv, read_arff, write_arff
from .linreg import CRITERIA, SELECTIONS, LinearModel, fit_linreg
from .report import (
    correlation_coefficient,
    evaluate_model,
    growth_report,
    growth_table,
    prediction_table,
    spreadsheet_rows,
    to_csv,
    to_pretty,
)
from .smoreg import SvrParams, fit_smoreg

PROG = "regrkit"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


# --- argument types -------------------------------------------------------------

def _name_list(text: str) -> list[str]:
    names = [t.strip() for t in text.split(",")]
    if not all(names):
        raise argparse.ArgumentTypeError(f"empty name in list {text!r}")
    if len(set(names)) != len(names):
        raise argparse.ArgumentTypeError(f"duplicate name in list {text!r}")
    return names


def _float_type(lo: float, strict: bool):
    def conv(text: str) -> float:
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        ok = v > lo if strict else v >= lo
        if not ok or v != v or v == float("inf"):
            op = ">" if strict else ">="
            raise argparse.ArgumentTypeError(f"must be finite and {op} {lo:g}, got {text}")
        return v
    return conv


def _int_type(lo: int):
    def conv(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {v}")
        return v
    return conv


# --- file helpers ---------------------------------------------------------------

def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return fh.read()
    except FileNotFoundError:
        raise DataError(f"{path}: no such file") from None
    except UnicodeDecodeError as e:
        raise DataError(f"{path}: not valid UTF-8 ({e.reason} at byte {e.start})") from None
    except OSError as e:
        raise DataError(f"{path}: {e.strerror or e}") from None


def _load_data(path: str):
    text = _read_text(path)
    try:
        return read_arff(text).dataset
    except DataError as e:
        raise DataError(f"{path}: {e}") from None


def _write_atomic(path: str, text: str) -> None:
    target = Path(path)
    directory = target.parent if str(target.parent) else Path(".")
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{target.name}.", suffix=".tmp")
    except OSError as e:
        raise DataError(f"{path}: cannot write ({e.strerror or e})") from None
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        _write_atomic(out, text)


def _check_paths(inputs, out) -> None:
    if out is None:
        return
    o = os.path.realpath(out)
    for p in inputs:
        if p is not None and os.path.realpath(p) == o:
            raise UsageError(f"{PROG}: --out {out!r} would overwrite an input file")


def _table(table, pretty: bool) -> str:
    return to_pretty(table) if pretty else to_csv(table)


# --- subcommands ----------------------------------------------------------------

def cmd_ingest(a) -> None:
    _check_paths([a.inp], a.out)
    text = _read_text(a.inp)
    try:
        d = ingest_csv(text, a.label_cols or ())
    except DataError as e:
        raise DataError(f"{a.inp}: {e}") from None
    relation = a.relation or Path(a.inp).stem or "data"
    _write_atomic(a.out, write_arff(d, relation))
    print(f"{a.inp}: {d.n} instances, {len(d.attributes)} attributes", file=sys.stderr)


def cmd_describe(a) -> None:
    d = _load_data(a.data)
    header = ("attribute", "kind", "n", "min", "max", "mean", "stddev")
    rows = []
    for spec in d.attributes:
        if spec.kind == NUMERIC:
            s = column_stats(d, spec.name)
            rows.append([spec.name, spec.kind, str(s.n)] +
                        [format(v, ".6g") for v in (s.min, s.max, s.mean, s.stddev)])
        else:
            rows.append([spec.name, spec.kind, str(d.n), "", "", "", ""])
    sys.stdout.write(_table((header, rows), a.pretty))


def cmd_correlate(a) -> None:
    _check_paths([a.data], a.out)
    d = _load_data(a.data)
    corr = correlation_matrix(d, a.attrs)
    if a.pretty:
        header = ("",) + tuple(corr.names)
        digits = (lambda v: f"{v:.{a.round}f}") if a.round is not None else (
            lambda v: format(v, ".6g"))
        rows = [[n] + [digits(float(v)) for v in corr.values[i]]
                for i, n in enumerate(corr.names)]
        _emit(to_pretty((header, rows)), a.out)
    else:
        _emit(corr.to_csv(a.round), a.out)


def _candidates(d, target, attrs):
    d.numeric_spec(target)
    if attrs is not None:
        return attrs
    return [n for n in d.numeric_names if n != target]


def cmd_fit_linreg(a) -> None:
    _check_paths([a.data], a.out)
    d = _load_data(a.data)
    m = fit_linreg(d, a.target, _candidates(d, a.target, a.attrs), a.selection, a.criterion)
    _write_atomic(a.out, modelio.dumps(m))
    print(m.equation(4))


def cmd_fit_smoreg(a) -> None:
    _check_paths([a.data], a.out)
    d = _load_data(a.data)
    params = SvrParams(C=a.c, epsilon=a.epsilon, tolerance=a.tol, max_updates=a.max_updates)
    m = fit_smoreg(d, a.target, _candidates(d, a.target, a.attrs), a.filter, params)
    _write_atomic(a.out, modelio.dumps(m))
    width = max(len(n) for n in m.attributes)
    lines = [f"weights ({a.filter} space), {m.updates} updates:"]
    lines += [f"  {n.ljust(width)}  {w:+.4f}" for n, w in zip(m.attributes, m.weights)]
    lines.append(f"  {'bias'.ljust(width)}  {m.bias:+.4f}")
    print("\n".join(lines))


def cmd_select_cfs(a) -> None:
    d = _load_data(a.data)
    res = cfs_select(d, a.target, stale_limit=a.stale_limit,
                     locally_predictive=not a.no_locally_predictive, weighting=a.merit)
    sys.stdout.write(format_selection(res, d, a.target, not a.no_locally_predictive))


def cmd_evaluate(a) -> None:
    _check_paths([a.model, a.data], a.out)
    text = _read_text(a.model)
    try:
        m = modelio.loads(text)
    except DataError as e:
        raise DataError(f"{a.model}: {e}") from None
    d = _load_data(a.data)
    exact = evaluate_model(m, d)
    pct = 3 if isinstance(m, LinearModel) else 0
    rows = spreadsheet_rows(m, d) if a.rounding == "spreadsheet" else exact
    _emit(_table(prediction_table(rows, pct), a.pretty), a.out)
    cc = f"correlation coefficient: {correlation_coefficient(exact):.4f}"
    print(cc, file=sys.stdout if a.out else sys.stderr)


def cmd_report_growth(a) -> None:
    _check_paths([a.data], a.out)
    d = _load_data(a.data)
    rows = growth_report(d, a.target, a.cost_attrs, a.baseline_row)
    _emit(_table(growth_table(rows), a.pretty), a.out)


# --- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog=PROG, description="Tabular regression toolkit.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def data_arg(sp):
        sp.add_argument("--data", required=True, metavar="FILE", help="input dataset (ARFF)")

    def target_arg(sp, help_text="numeric target attribute"):
        sp.add_argument("--target", required=True, metavar="NAME", help=help_text)

    def out_arg(sp, required=False, what="output file (default: stdout)"):
        sp.add_argument("--out", required=required, metavar="FILE", help=what)

    def pretty_arg(sp):
        sp.add_argument("--pretty", action="store_true",
                        help="print an aligned text table instead of CSV")

    def attrs_arg(sp):
        sp.add_argument("--attrs", type=_name_list, metavar="A,B,...",
                        help="candidate attributes (default: every numeric non-target)")

    sp = sub.add_parser("ingest", help="convert a raw CSV file to ARFF",
                        description="Parse a raw CSV export (unit-suffixed quantities such "
                                    "as '$1,450', '14.5k'), drop exact duplicate rows and "
                                    "write ARFF.")
    sp.add_argument("--in", dest="inp", required=True, metavar="FILE", help="raw CSV input")
    out_arg(sp, True, "ARFF output file")
    sp.add_argument("--label-cols", type=_name_list, metavar="NAME[,NAME...]",
                    help="columns kept as text labels instead of numbers")
    sp.add_argument("--relation", metavar="NAME",
                    help="ARFF relation name (default: input file stem)")
    sp.set_defaults(func=cmd_ingest)

    sp = sub.add_parser("describe", help="per-attribute summary statistics",
                        description="Print n, min, max, mean and sample standard "
                                    "deviation for every attribute.")
    data_arg(sp)
    pretty_arg(sp)
    sp.set_defaults(func=cmd_describe)

    sp = sub.add_parser("correlate", help="Pearson correlation matrix",
                        description="Write the Pearson correlation matrix as CSV "
                                    "(6 significant digits unless --round is given).")
    data_arg(sp)
    sp.add_argument("--round", type=_int_type(0), metavar="N",
                    help="print every cell with N decimals")
    attrs_arg(sp)
    out_arg(sp)
    pretty_arg(sp)
    sp.set_defaults(func=cmd_correlate)

    fit = sub.add_parser("fit", help="fit a regression model",
                         description="Fit a linear or SVR model and save it.")
    fit_sub = fit.add_subparsers(dest="model_kind", metavar="MODEL", parser_class=_Parser)
    fit_sub.required = True

    sp = fit_sub.add_parser("linreg", help="least-squares linear regression",
                            description="Least-squares fit, optionally after Akaike "
                                        "attribute elimination.")
    data_arg(sp)
    target_arg(sp)
    attrs_arg(sp)
    sp.add_argument("--selection", choices=SELECTIONS, default="none",
                    help="attribute elimination: none, greedy backward, exhaustive "
                         "subset search, or m5 (drop smallest standardized "
                         "coefficient) (default: none)")
    sp.add_argument("--criterion", choices=CRITERIA, default="ratio",
                    help="Akaike score: ratio (SSE relative to the full model) or "
                         "loglik (n ln(SSE/n)) (default: ratio)")
    out_arg(sp, True, "model file to write")
    sp.set_defaults(func=cmd_fit_linreg)

    sp = fit_sub.add_parser("smoreg", help="linear epsilon-SVR trained by SMO",
                            description="Epsilon-insensitive support vector regression "
                                        "with a linear kernel, trained by sequential "
                                        "minimal optimization on filtered data.")
    data_arg(sp)
    target_arg(sp)
    attrs_arg(sp)
    sp.add_argument("--filter", choices=FILTER_KINDS, required=True,
                    help="scaling applied to the attributes and the target")
    sp.add_argument("--c", type=_float_type(0, True), default=1.0, metavar="X",
                    help="box constraint C (default: 1.0)")
    sp.add_argument("--epsilon", type=_float_type(0, False), default=1e-3, metavar="X",
                    help="width of the insensitive tube (default: 0.001)")
    sp.add_argument("--tol", type=_float_type(0, True), default=1e-3, metavar="X",
                    help="KKT violation tolerance (default: 0.001)")
    sp.add_argument("--max-updates", type=_int_type(1), default=1_000_000, metavar="N",
                    help="update budget before giving up (default: 1000000)")
    out_arg(sp, True, "model file to write")
    sp.set_defaults(func=cmd_fit_smoreg)

    sel = sub.add_parser("select", help="attribute subset selection",
                         description="Select attributes without fitting a model.")
    sel_sub = sel.add_subparsers(dest="method", metavar="METHOD", parser_class=_Parser)
    sel_sub.required = True
    sp = sel_sub.add_parser("cfs", help="correlation-based feature subset selection",
                            description="Best-first CFS search plus locally predictive "
                                        "attributes; indices count numeric attributes "
                                        "from 1.")
    data_arg(sp)
    target_arg(sp)
    sp.add_argument("--stale-limit", type=_int_type(1), metavar="N",
                    help="stop after N non-improving expansions (default: exhaustive "
                         "for up to 10 candidates, else 5)")
    sp.add_argument("--merit", choices=WEIGHTINGS, default="sd",
                    help="attribute weighting in the merit: sd (standard deviation "
                         "weighted) or unit (plain mean correlations) (default: sd)")
    sp.add_argument("--no-locally-predictive", action="store_true",
                    help="skip the locally predictive augmentation")
    sp.set_defaults(func=cmd_select_cfs)

    sp = sub.add_parser("evaluate", help="prediction table for a saved model",
                        description="Predict every instance and report actual, "
                                    "predicted, difference and error percent. The "
                                    "correlation coefficient is printed as well.")
    sp.add_argument("--model", required=True, metavar="FILE", help="model file")
    data_arg(sp)
    sp.add_argument("--rounding", choices=("exact", "spreadsheet"), default="exact",
                    help="exact predictions, or spreadsheet style: constants at 4 "
                         "decimals, predictions and percentages rounded up "
                         "(default: exact)")
    out_arg(sp)
    pretty_arg(sp)
    sp.set_defaults(func=cmd_evaluate)

    rep = sub.add_parser("report", help="business reports",
                         description="Reports derived from a dataset.")
    rep_sub = rep.add_subparsers(dest="report", metavar="REPORT", parser_class=_Parser)
    rep_sub.required = True
    sp = rep_sub.add_parser("growth", help="spend versus page-view growth report",
                            description="Estimate the page views each month's spend "
                                        "should buy at the baseline cost per view and "
                                        "report the surplus as a profit percentage.")
    data_arg(sp)
    target_arg(sp, "page-view attribute")
    sp.add_argument("--cost-attrs", type=_name_list, required=True, metavar="A,B",
                    help="cost attributes summed into the monthly spend")
    sp.add_argument("--baseline-row", type=_int_type(1), default=1, metavar="N",
                    help="1-based row that fixes the cost per view (default: 1)")
    out_arg(sp)
    pretty_arg(sp)
    sp.set_defaults(func=cmd_report_growth)
    return p


def run_cli(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return 1
    except SystemExit as e:  # --help and friends
        return e.code if isinstance(e.code, int) else 0
    except DataError as e:
        print(f"{PROG}: error: {e}", file=sys.stderr)
        return 2
    except NumericalError as e:
        print(f"{PROG}: numerical failure: {e}", file=sys.stderr)
        return 3
    return 0


def main() -> None:
    sys.exit(run_cli())

