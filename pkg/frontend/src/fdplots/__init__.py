"""Figure rendering for fdbackhaul aggregate CSVs."""

from .render import (
    SCHEDULER_STYLE,
    FigureSpec,
    SchemaError,
    load_aggregate,
    render,
    render_pair,
)

__version__ = "0.1.0"
