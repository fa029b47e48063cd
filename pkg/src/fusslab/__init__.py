"""Steady-state evolutionary algorithms with fitness uniform selection (FUSS),
fitness uniform deletion (FUDS) and their scale-independent variants."""
from .engine import Engine, EngineConfig, StoppingRule, run, step
from .population import Individual, Population
from .records import HistogramRecord, RunRecord, SummaryRecord, TraceRow
from .schemes import parse_deletion, parse_selection

__all__ = [
    "Engine", "EngineConfig", "StoppingRule", "run", "step", "Individual", "Population",
    "HistogramRecord", "RunRecord", "SummaryRecord", "TraceRow", "parse_deletion",
    "parse_selection",
]
__version__ = "0.1.0"
