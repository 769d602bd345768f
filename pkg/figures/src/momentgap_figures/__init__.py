"""Figure renderers for momentgap CSV outputs."""

from .core import FIGURE_IDS, FigureData, SchemaError, Series, extract, render

__all__ = ["FIGURE_IDS", "FigureData", "SchemaError", "Series", "extract", "render"]
