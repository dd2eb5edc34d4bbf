"""Figures from curved-burgers CSV output; consumes only the documented
snapshots.csv schema and never recomputes physics."""

from .figures import KINDS, FigureResult, FigureSpec, make_figure
from .reader import SchemaError, SnapshotTable, read_snapshots

__version__ = "0.1.0"
