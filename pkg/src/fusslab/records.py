from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Optional


@dataclass
class RunRecord:
    """Summary of one run. Field order is the CSV column order."""

    problem: str
    selection: str
    deletion: str
    tournament_k: Optional[int]
    capacity: int
    pc: float
    pm: float
    seed: int
    cycles: int
    generations: float
    best_fitness: float
    best_raw: float
    T_target: Optional[int]
    # not written to CSV
    evaluations: int = field(default=0, metadata={"csv": False})
    censored: bool = field(default=False, metadata={"csv": False})

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls) if f.metadata.get("csv", True)]


@dataclass
class SummaryRecord:
    """One experiment: the designated metric aggregated over repetitions."""

    problem: str
    selection: str
    deletion: str
    tournament_k: Optional[int]
    capacity: int
    reps: int
    metric: str
    mean: float
    sstd: float
    stderr: float
    ci95_low: float
    ci95_high: float
    censored: int

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]


@dataclass(frozen=True)
class HistogramRecord:
    bin_low: float
    bin_high: float
    count: int

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]


@dataclass(frozen=True)
class TraceRow:
    """One diversity-trace sample; ``best_fitness_so_far`` is the best
    fitness seen in the run up to ``generation``. ``sampled`` marks a
    total diversity estimated from random pairs instead of all pairs."""

    rep: int
    generation: float
    best_fitness_so_far: float
    total_diversity: Optional[float]
    highfit_diversity: Optional[float]
    sampled: bool = False

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]
