"""FIRRTL frontend: parsing, flattening, width extraction, annotation."""

from .annotate import apply_solution, width_report
from .ast import Circuit, Module
from .extract import (ExtractionError, LeafTable, TypeMismatch,
                      UnboundReference, extract)
from .parser import FirrtlSyntaxError, UnsupportedConstruct, parse
from .widths import UnsupportedOp, WidthTypeError, typed_width

__all__ = [
    "Circuit", "Module", "LeafTable",
    "parse", "extract", "apply_solution", "width_report", "typed_width",
    "FirrtlSyntaxError", "UnsupportedConstruct", "ExtractionError",
    "TypeMismatch", "UnboundReference", "UnsupportedOp", "WidthTypeError",
]
