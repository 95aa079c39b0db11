"""Tabular regression toolkit: ingest, correlate, fit, select and report."""

from .cfs import CfsResult, cfs_merit, cfs_select
from .core import AttributeSpec, CorrelationMatrix, Dataset, build_dataset, correlation_matrix, pearson
from .errors import DataError, NumericalError, RegrkitError
from .filters import FilterModel, apply_filter, fit_filter
from .ingest import ingest_csv, parse_arff, parse_quantity, read_arff, write_arff
from .linreg import LinearModel, fit_linreg, fit_ols, predict_linear, select_attributes_aic
from .modelio import load_model, save_model
from .report import evaluate_model, growth_report, spreadsheet_rows
from .smoreg import SvrModel, SvrParams, fit_smoreg, predict_svr

__version__ = "0.1.0"
