from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Optional


@dataclass(frozen=True)
class ProblemBinding:
    """Everything the engine needs to optimise one problem.

    ``epsilon`` is the fitness level spacing for discrete problems (0 for
    continuous fitness) and ``n_levels`` the number of attainable fitness
    values when that is small and known; both steer FUSS and the default
    FUDS bin count. ``raw`` maps fitness back to the problem's natural
    quantity (tour length, cover cost, satisfied clauses) and
    ``maximize_raw`` says which direction of it is better.
    """

    name: str
    random_genome: Callable[[Any], Any]
    mutate: Callable[[Any, Any], Any]
    crossover: Callable[[Any, Any, Any], Any]
    fitness: Callable[[Any], float]
    bounds: tuple[float, float]
    target_reached: Callable[[float], bool] = lambda f: False
    epsilon: float = 0.0
    n_levels: Optional[int] = None
    raw: Callable[[float], float] = lambda f: f
    maximize_raw: bool = True
    hamming: Optional[Callable[[Any, Any], int]] = None
