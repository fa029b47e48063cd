"""Steady-state evolutionary loop.

Each cycle selects a parent, optionally a second one for crossover, builds
a child, evaluates it once, inserts it, and, when the population was full
before the insertion, deletes one member so the size is restored. Below
capacity the population simply grows.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Any, Callable, Optional

from .population import Individual, Population
from .problems.binding import ProblemBinding
from .records import RunRecord
from .schemes import Deletion, Selection, parse_deletion, parse_selection


def generations_of(cycles: int, pop_size: int) -> float:
    """Steady-state cycles expressed as generations of ``pop_size`` births."""
    if pop_size < 1:
        raise ValueError("population size must be positive")
    return cycles / pop_size


def default_nbins(capacity: int, n_levels: int | None = None) -> int:
    """``round(sqrt(capacity))`` bins, never more than the attainable levels."""
    nb = max(1, round(math.sqrt(capacity)))
    if n_levels is not None:
        nb = min(nb, n_levels)
    return nb


@dataclass
class EngineConfig:
    capacity: int
    selection: str = "fuss"
    deletion: str = "random"
    crossover_probability: float = 0.5
    mutation_probability: float = 0.5
    initial_size: Optional[int] = None
    nbins: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("capacity must be positive")
        if self.initial_size is None:
            self.initial_size = self.capacity
        if not 1 <= self.initial_size <= self.capacity:
            raise ValueError("initial_size must lie in 1..capacity")
        for name in ("crossover_probability", "mutation_probability"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        # fail early on bad scheme ids
        parse_selection(self.selection)
        parse_deletion(self.deletion)


@dataclass(frozen=True)
class StepReport:
    child_fitness: float
    used_crossover: bool
    deleted_fitness: Optional[float]
    cycle_index: int


@dataclass(frozen=True)
class StoppingRule:
    """Stop when any active criterion fires; ``max_cycles`` always applies."""

    max_cycles: int = 10_000_000
    generations: Optional[int] = None
    stall_generations: Optional[int] = None
    target: bool = False

    def __post_init__(self):
        if self.max_cycles < 0:
            raise ValueError("max_cycles must be >= 0")


class Engine:
    """One run's mutable state: population, RNG and scheme objects."""

    def __init__(self, problem: ProblemBinding, config: EngineConfig,
                 rng: random.Random | None = None):
        self.problem = problem
        self.config = config
        self.rng = rng if rng is not None else random.Random(config.seed)
        self.selection: Selection = parse_selection(config.selection, problem.epsilon)
        self.deletion: Deletion = parse_deletion(config.deletion)
        bounds = nbins = None
        if self.deletion.binned:
            bounds = problem.bounds
            nbins = config.nbins or default_nbins(config.capacity, problem.n_levels)
        self.population = Population(config.capacity, bounds, nbins)
        self.cycles = 0
        self.evaluations = 0
        self.best: Individual | None = None
        self.first_hit: int | None = None

    def evaluate(self, genome: Any) -> Individual:
        f = self.problem.fitness(genome)
        self.evaluations += 1
        ind = Individual(genome, f)
        if self.best is None or f > self.best.fitness:
            self.best = ind
        if self.first_hit is None and self.problem.target_reached(f):
            self.first_hit = self.evaluations
        return ind

    def seed_population(self) -> None:
        for _ in range(self.config.initial_size):
            self.population.add(self.evaluate(self.problem.random_genome(self.rng)))

    def step(self) -> StepReport:
        return step(self)


def step(engine: Engine) -> StepReport:
    """Run one steady-state cycle on ``engine``."""
    pop = engine.population
    if not len(pop):
        raise ValueError("step needs a non-empty population")
    rng = engine.rng
    prob = engine.problem
    cfg = engine.config
    sel = engine.selection
    crossed = cfg.crossover_probability > 0 and rng.random() < cfg.crossover_probability
    if crossed:
        if sel.pair:
            a, b = sel.select_pair(pop, rng)
        else:
            a = sel.select(pop, rng)
            b = sel.select(pop, rng)
        genome = prob.crossover(a.genome, b.genome, rng)
        if cfg.mutation_probability > 0 and rng.random() < cfg.mutation_probability:
            genome = prob.mutate(genome, rng)
    else:
        a = sel.select(pop, rng)
        genome = prob.mutate(a.genome, rng)
    was_full = pop.full
    child = pop.add(engine.evaluate(genome))
    deleted = None
    if was_full:
        deleted = engine.deletion.delete(pop, rng, parent=a).fitness
    report = StepReport(child.fitness, crossed, deleted, engine.cycles)
    engine.cycles += 1
    return report


def run(problem: ProblemBinding, config: EngineConfig, stopping: StoppingRule,
        rng: random.Random | None = None, **hooks) -> RunRecord:
    """Seed a population and iterate :func:`step` until ``stopping`` fires.

    See :func:`drive` for the hooks and the meaning of ``T_target``.
    """
    eng = Engine(problem, config, rng)
    eng.seed_population()
    return drive(eng, stopping, **hooks)


def drive(eng: Engine, stopping: StoppingRule, *,
          on_step: Callable[[Engine, StepReport], None] | None = None,
          on_generation: Callable[[Engine, float], None] | None = None,
          trace_every: float = 1.0) -> RunRecord:
    """Iterate an already seeded engine until ``stopping`` fires.

    ``T_target`` counts fitness evaluations, initial population included,
    up to and including the first individual that reaches the target.
    ``on_generation`` is called at the start and then every
    ``trace_every`` generations with the current generation number.
    """
    problem, config = eng.problem, eng.config
    cap = config.capacity
    trace_cycles = max(1, round(trace_every * cap))
    stall_cycles = None if stopping.stall_generations is None else stopping.stall_generations * cap
    gen_cycles = None if stopping.generations is None else stopping.generations * cap
    last_improve = 0
    best_f = eng.best.fitness
    if on_generation:
        on_generation(eng, 0.0)
    censored = False
    while True:
        if stopping.target and eng.first_hit is not None:
            break
        if gen_cycles is not None and eng.cycles >= gen_cycles:
            break
        if stall_cycles is not None and eng.cycles - last_improve >= stall_cycles:
            break
        if eng.cycles >= stopping.max_cycles:
            censored = stopping.target
            break
        report = step(eng)
        if on_step:
            on_step(eng, report)
        if eng.best.fitness > best_f:
            best_f = eng.best.fitness
            last_improve = eng.cycles
        if on_generation and eng.cycles % trace_cycles == 0:
            on_generation(eng, eng.cycles / cap)
    sel = eng.selection
    return RunRecord(
        problem=problem.name,
        selection=sel.id,
        deletion=eng.deletion.id,
        tournament_k=sel.tournament_size,
        capacity=cap,
        pc=config.crossover_probability,
        pm=config.mutation_probability,
        seed=config.seed,
        cycles=eng.cycles,
        generations=generations_of(eng.cycles, cap),
        best_fitness=eng.best.fitness,
        best_raw=problem.raw(eng.best.fitness),
        T_target=eng.first_hit,
        evaluations=eng.evaluations,
        censored=censored and eng.first_hit is None,
    )
