"""Repeated runs, summary statistics, diversity and histogram measurements."""
from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .engine import Engine, EngineConfig, StoppingRule, drive
from .population import Individual, Population, fitness_level_index
from .problems.binding import ProblemBinding
from .records import HistogramRecord, RunRecord, SummaryRecord, TraceRow

Z95 = 1.96
EXACT_PAIR_LIMIT = 2_000_000
SAMPLED_PAIRS = 100_000


# ---------------------------------------------------------------------------
# problem specs
# ---------------------------------------------------------------------------


def make_problem(spec: str, seed: int = 0) -> ProblemBinding:
    """Build a problem from ``deceptive:<D>:<width> | tsp:<n or file> |
    scp:<file> | sat:<file>``. Random TSP instances are drawn from ``seed``."""
    from .io import read_dimacs, read_orlib_scp
    from .problems.deceptive import DeceptiveParams, deceptive_problem
    from .problems.sat import sat_problem
    from .problems.scp import scp_problem
    from .problems.tsp import read_tsp, tsp_problem, tsp_random_instance

    kind, _, rest = spec.partition(":")
    if not rest:
        raise ValueError(f"problem spec {spec!r} needs an argument")
    if kind == "deceptive":
        parts = rest.split(":")
        if len(parts) != 2:
            raise ValueError("expected deceptive:<D>:<width>")
        return deceptive_problem(DeceptiveParams.evenly_spaced(int(parts[0]), float(parts[1])))
    if kind == "tsp":
        if rest.isdigit():
            return tsp_problem(tsp_random_instance(int(rest), random.Random(seed)))
        return tsp_problem(read_tsp(rest), name=f"tsp:{rest}")
    if kind == "scp":
        return scp_problem(read_orlib_scp(rest), name=f"scp:{rest}")
    if kind == "sat":
        return sat_problem(read_dimacs(rest), name=f"sat:{rest}")
    raise ValueError(f"unknown problem kind {kind!r}")


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Stats:
    mean: float
    sstd: float
    stderr: float
    ci95: tuple[float, float]


def summarize_stats(values: Sequence[float]) -> Stats:
    """Mean, sample std (R-1 denominator), standard error and a normal 95% CI."""
    if not values:
        raise ValueError("no values to summarize")
    mean = statistics.fmean(values)
    if len(values) == 1:
        return Stats(mean, 0.0, 0.0, (mean, mean))
    sstd = statistics.stdev(values)
    se = sstd / math.sqrt(len(values))
    return Stats(mean, sstd, se, (mean - Z95 * se, mean + Z95 * se))


# ---------------------------------------------------------------------------
# diversity and histograms
# ---------------------------------------------------------------------------


def _genomes(population) -> list:
    return [m.genome if isinstance(m, Individual) else m for m in population]


@dataclass(frozen=True)
class Diversity:
    value: float
    sampled: bool


def _bit_matrix(genomes) -> np.ndarray | None:
    if genomes and all(isinstance(g, np.ndarray) and g.dtype == bool for g in genomes):
        if len({g.shape for g in genomes}) == 1:
            return np.stack(genomes)
    return None


def mean_pairwise_distance(population, hamming: Callable | None = None,
                           exact_limit: int = EXACT_PAIR_LIMIT,
                           pair_budget: int = SAMPLED_PAIRS, rng=None) -> Diversity:
    """Mean hamming distance over all unordered pairs, or over
    ``pair_budget`` random pairs once there are more than ``exact_limit``."""
    g = _genomes(population)
    n = len(g)
    if n < 2:
        raise ValueError("diversity needs at least two members")
    n_pairs = n * (n - 1) // 2
    bits = _bit_matrix(g) if hamming is None else None
    if hamming is None and bits is None:
        raise TypeError("genomes have no hamming distance; pass one explicitly")
    if n_pairs <= exact_limit:
        if bits is not None:
            ones = bits.sum(axis=0, dtype=np.int64)
            return Diversity(float((ones * (n - ones)).sum()) / n_pairs, False)
        total = sum(hamming(g[i], g[j]) for i in range(n) for j in range(i + 1, n))
        return Diversity(total / n_pairs, False)
    rng = rng or random.Random(0)
    dist = hamming or (lambda a, b: int(np.count_nonzero(a != b)))
    total = 0
    for _ in range(pair_budget):
        i, j = rng.sample(range(n), 2)
        total += dist(g[i], g[j])
    return Diversity(total / pair_budget, True)


def diversity_total(population, hamming: Callable | None = None, **kw) -> float:
    """Average hamming distance between members of the whole population."""
    return mean_pairwise_distance(population, hamming, **kw).value


def high_fitness_subset(population, window: float) -> list[Individual]:
    members = list(population)
    top = max(m.fitness for m in members)
    return [m for m in members if m.fitness >= top - window]


def diversity_high_fitness(population, window: float = 20.0,
                           hamming: Callable | None = None, **kw) -> Optional[float]:
    """Diversity among members within ``window`` of the best fitness;
    None when fewer than two qualify."""
    if window <= 0:
        raise ValueError("window must be positive")
    sub = high_fitness_subset(population, window)
    if len(sub) < 2:
        return None
    return mean_pairwise_distance(sub, hamming, **kw).value


def fitness_histogram(population, bounds: tuple[float, float], nbins: int) -> list[HistogramRecord]:
    if nbins < 1:
        raise ValueError("nbins must be >= 1")
    lo, hi = bounds
    width = (hi - lo) / nbins
    counts = [0] * nbins
    for m in population:
        counts[fitness_level_index(m.fitness, bounds, nbins)] += 1
    return [HistogramRecord(lo + k * width, hi if k == nbins - 1 else lo + (k + 1) * width, c)
            for k, c in enumerate(counts)]


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------


@dataclass
class ExperimentSpec:
    problem: str
    config: EngineConfig
    stopping: StoppingRule
    reps: int = 1
    base_seed: int = 0
    trace_every: Optional[float] = None
    window: float = 20.0
    metric: Optional[str] = None  # T_target when stopping on target, else best_raw

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.window <= 0:
            raise ValueError("diversity window must be positive")
        if self.metric is None:
            self.metric = "T_target" if self.stopping.target else "best_raw"
        if self.metric not in ("T_target", "best_raw", "best_fitness", "cycles"):
            raise ValueError(f"unknown metric {self.metric!r}")


@dataclass
class ExperimentSummary:
    records: list[RunRecord]
    metric: str
    stats: Stats
    censored: int = 0
    traces: list[TraceRow] = field(default_factory=list)
    final_populations: list[Population] = field(default_factory=list)

    @property
    def mean(self) -> float:
        return self.stats.mean

    def row(self) -> SummaryRecord:
        r = self.records[0]
        s = self.stats
        return SummaryRecord(r.problem, r.selection, r.deletion, r.tournament_k, r.capacity,
                             len(self.records), self.metric, s.mean, s.sstd, s.stderr,
                             s.ci95[0], s.ci95[1], self.censored)


def _tracer(rep: int, problem: ProblemBinding, window: float, out: list[TraceRow]):
    def on_generation(eng: Engine, gen: float) -> None:
        pop = eng.population
        total = high = None
        sampled = False
        if len(pop) >= 2:
            d = mean_pairwise_distance(pop, problem.hamming, rng=eng.rng)
            total, sampled = d.value, d.sampled
            high = diversity_high_fitness(pop, window, problem.hamming, rng=eng.rng)
        out.append(TraceRow(rep, gen, eng.best.fitness, total, high, sampled))
    return on_generation


def run_experiment(spec: ExperimentSpec, problem: ProblemBinding | None = None,
                   keep_populations: bool = False,
                   on_step: Callable | None = None) -> ExperimentSummary:
    """Run ``spec.reps`` independent repetitions seeded ``base_seed + r``."""
    problem = problem or make_problem(spec.problem, spec.base_seed)
    records, traces, pops = [], [], []
    for r in range(spec.reps):
        cfg = replace(spec.config, seed=spec.base_seed + r)
        eng = Engine(problem, cfg, random.Random(cfg.seed))
        eng.seed_population()
        hooks: dict[str, Any] = {"on_step": on_step}
        if spec.trace_every is not None:
            hooks["on_generation"] = _tracer(r, problem, spec.window, traces)
            hooks["trace_every"] = spec.trace_every
        rec = drive(eng, spec.stopping, **hooks)
        eng.population.check_integrity()
        records.append(rec)
        if keep_populations:
            pops.append(eng.population)
    values = [getattr(x, spec.metric) for x in records]
    hit = [v for v in values if v is not None]
    if not hit:
        raise RuntimeError(f"every run was censored; no {spec.metric} values")
    return ExperimentSummary(records, spec.metric, summarize_stats(hit),
                             len(values) - len(hit), traces, pops)


def with_delta(problem: str, delta: float) -> str:
    kind, _, rest = problem.partition(":")
    if kind != "deceptive":
        raise ValueError("delta sweeps need a deceptive problem")
    return f"deceptive:{rest.split(':')[0]}:{delta:g}"


def sweep(spec: ExperimentSpec, tour_sizes: Sequence[int] = (), deltas: Sequence[float] = (),
          pops: Sequence[int] = ()) -> list[ExperimentSummary]:
    """Grid over tournament sizes, deceptive widths and capacities; each
    grid point reuses the base seed so rows are reproducible."""
    out = []
    for k in tour_sizes or [None]:
        for d in deltas or [None]:
            for cap in pops or [None]:
                cfg = spec.config
                if k is not None:
                    cfg = replace(cfg, selection=f"tour:{k}")
                if cap is not None:
                    init = cfg.initial_size if cfg.initial_size <= cap else cap
                    if spec.config.initial_size == spec.config.capacity:
                        init = cap
                    cfg = replace(cfg, capacity=cap, initial_size=init)
                prob = spec.problem if d is None else with_delta(spec.problem, d)
                out.append(run_experiment(replace(spec, problem=prob, config=cfg)))
    return out


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])
