"""Regret-curve renderer for corralsim summary CSVs."""

from .render import EXPECTED_COLUMNS, SchemaError, SeriesBundle, load_summary, render

__version__ = "0.1.0"
