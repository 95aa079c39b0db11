"""Bundled sample data: the 15-month web-analytics export."""

from importlib import resources

from .core import Dataset
from .ingest import ingest_csv

TRAFFIC_TARGET = "Page_Views"
TRAFFIC_LABEL = "Month"


def traffic_text() -> str:
    return resources.files(__package__).joinpath("data/monthly_traffic.csv").read_text(encoding="utf-8")


def load_traffic() -> Dataset:
    """Monthly subscribers, ad spend, reminder emails, uploads and page views."""
    return ingest_csv(traffic_text(), label_columns=[TRAFFIC_LABEL])
