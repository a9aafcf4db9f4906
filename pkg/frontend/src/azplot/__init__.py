"""Read-only figure emitter for simulation outputs.

Consumes the binary grid files and diagnostics CSVs written by the
simulator; never recomputes physics.
"""

from .formats import FormatError, SchemaError, read_grid, read_series
from .render import render_field, render_supnorm_series

__all__ = [
    "FormatError",
    "SchemaError",
    "read_grid",
    "read_series",
    "render_field",
    "render_supnorm_series",
]
