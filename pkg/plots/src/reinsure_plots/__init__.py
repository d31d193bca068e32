"""Figure rendering for reinsure-lab CSV outputs."""

from .render import FigureJob, SchemaError, discover_jobs, render

__version__ = "0.1.0"
