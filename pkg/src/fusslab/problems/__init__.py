"""Benchmark problems: deceptive features, TSP, set covering and MAX-SAT."""
from .binding import ProblemBinding
from .deceptive import DeceptiveParams, deceptive_fitness, deceptive_problem
from .sat import CnfFormula, sat_fitness, sat_problem
from .scp import ScpInstance, scp_fitness, scp_problem, scp_repair
from .tsp import TspInstance, tour_length, tsp_fitness, tsp_problem, tsp_random_instance

__all__ = [
    "ProblemBinding", "DeceptiveParams", "deceptive_fitness", "deceptive_problem",
    "CnfFormula", "sat_fitness", "sat_problem", "ScpInstance", "scp_fitness",
    "scp_problem", "scp_repair", "TspInstance", "tour_length", "tsp_fitness",
    "tsp_problem", "tsp_random_instance",
]
