from __future__ import annotations

import math
import random
import statistics

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fusslab.bench import (ExperimentSpec, diversity_high_fitness, diversity_total,
                           fitness_histogram, loglog_slope, make_problem, mean_pairwise_distance,
                           run_experiment, summarize_stats, sweep, with_delta)
from fusslab.engine import EngineConfig, StoppingRule
from fusslab.population import Individual, Population


def bits(s):
    return np.array([c == "T" for c in s])


def ind(s, f=0.0):
    return Individual(bits(s), f)


def test_stats_hand_example():
    s = summarize_stats([1, 2, 3])
    assert (s.mean, s.sstd) == (2, 1)
    assert s.stderr == pytest.approx(0.5774, abs=1e-4)
    assert s.ci95 == pytest.approx((0.868, 3.132), abs=1e-3)


def test_stats_degenerate():
    s = summarize_stats([5])
    assert (s.mean, s.sstd, s.stderr, s.ci95) == (5, 0, 0, (5, 5))
    assert summarize_stats([2, 2, 2, 2]).sstd == 0
    with pytest.raises(ValueError):
        summarize_stats([])


@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=50))
def test_stats_invariants(xs):
    s = summarize_stats(xs)
    assert s.stderr == pytest.approx(s.sstd / math.sqrt(len(xs)), rel=1e-12, abs=1e-12)
    assert s.ci95[0] == pytest.approx(s.mean - 1.96 * s.stderr, rel=1e-12, abs=1e-9)
    assert s.sstd == pytest.approx(statistics.stdev(xs), rel=1e-9, abs=1e-9)


def test_diversity_examples():
    assert diversity_total([ind("TTF"), ind("TFF")]) == 1.0
    assert diversity_total([ind("TFT")] * 4) == 0.0
    assert diversity_total([ind("TTT"), ind("FFF"), ind("TTT")]) == 2.0


def test_diversity_with_explicit_metric():
    pop = [Individual("abc", 0), Individual("abd", 0), Individual("xyz", 0)]
    ham = lambda a, b: sum(x != y for x, y in zip(a, b))
    assert diversity_total(pop, ham) == pytest.approx((1 + 3 + 3) / 3)
    with pytest.raises(TypeError):
        diversity_total(pop)


def test_high_fitness_diversity():
    pop = [ind("TTTT", 100), ind("FFFF", 95), ind("TTFF", 10)]
    assert diversity_high_fitness(pop, 20) == 4.0
    assert diversity_high_fitness(pop, 100) == diversity_total(pop)
    assert diversity_high_fitness(pop, 2) is None


def test_sampled_matches_exact():
    rng = random.Random(0)
    for _ in range(10):
        n, L = rng.randint(20, 60), rng.randint(5, 40)
        pop = [Individual(np.array([rng.random() < 0.3 for _ in range(L)]), 0) for _ in range(n)]
        exact = mean_pairwise_distance(pop)
        ham = [int(np.count_nonzero(a.genome != b.genome)) for i, a in enumerate(pop)
               for b in pop[i + 1:]]
        sd = statistics.pstdev(ham)
        est = mean_pairwise_distance(pop, exact_limit=0, pair_budget=4000, rng=rng)
        assert not exact.sampled and est.sampled
        assert exact.value == pytest.approx(statistics.fmean(ham))
        assert abs(est.value - exact.value) <= 4 * sd / math.sqrt(4000) + 1e-12


def test_histogram():
    pop = Population(members=[Individual(None, f) for f in (0, 1, 1, 2, 3, 3, 3)])
    h = fitness_histogram(pop, (0.0, 3.0), 4)
    assert [x.count for x in h] == [1, 2, 1, 3]
    assert h[0].bin_low == 0.0 and h[-1].bin_high == 3.0
    assert sum(x.count for x in h) == len(pop)
    single = fitness_histogram(Population(members=[Individual(None, 2.0)] * 1), (0, 3), 3)
    assert sum(1 for x in single if x.count) == 1


@given(st.lists(st.floats(0, 10), min_size=1, max_size=80), st.integers(1, 30))
def test_histogram_sums(fs, nbins):
    h = fitness_histogram([Individual(None, f) for f in fs], (0.0, 10.0), nbins)
    assert sum(x.count for x in h) == len(fs)
    assert all(a.bin_high == pytest.approx(b.bin_low) for a, b in zip(h, h[1:]))


def spec(**kw):
    base = dict(problem="deceptive:2:0.2",
                config=EngineConfig(capacity=50, initial_size=10, crossover_probability=0.25),
                stopping=StoppingRule(target=True), reps=3, base_seed=7)
    base.update(kw)
    return ExperimentSpec(**base)


def test_run_experiment_deterministic():
    a, b = run_experiment(spec()), run_experiment(spec())
    assert a.records == b.records and a.stats == b.stats
    assert [r.seed for r in a.records] == [7, 8, 9]
    assert a.metric == "T_target"


def test_single_rep_summary():
    s = run_experiment(spec(reps=1))
    assert s.stats.mean == s.records[0].T_target and s.stats.stderr == 0


def test_quality_metric_and_trace():
    sp = spec(problem="sat:tests/data/uf20-small.cnf",
              config=EngineConfig(capacity=30, selection="tour:2"),
              stopping=StoppingRule(generations=3), reps=2, trace_every=1.0)
    s = run_experiment(sp)
    assert s.metric == "best_raw"
    assert [t.generation for t in s.traces] == [0, 1, 2, 3] * 2
    assert all(t.total_diversity is not None for t in s.traces)
    best = [t.best_fitness_so_far for t in s.traces[:4]]
    assert best == sorted(best)


def test_sweep_rows():
    rows = sweep(spec(reps=2, config=EngineConfig(capacity=40, selection="tour:2",
                                                   initial_size=10)),
                 tour_sizes=[2, 3], deltas=[0.3, 0.2])
    assert [(r.records[0].tournament_k, r.records[0].problem) for r in rows] == [
        (2, "deceptive:2:0.3"), (2, "deceptive:2:0.2"), (3, "deceptive:2:0.3"),
        (3, "deceptive:2:0.2")]


def test_make_problem_variants(data_dir):
    assert make_problem("tsp:6", 1).name == "tsp:6"
    assert make_problem(f"scp:{data_dir / 'scp-20x40.txt'}").name.startswith("scp:")
    assert make_problem("deceptive:3:0.1").n_levels == 5
    for bad in ("tsp", "knapsack:3", "deceptive:2"):
        with pytest.raises(ValueError):
            make_problem(bad)


def test_with_delta():
    assert with_delta("deceptive:2:0.1", 0.05) == "deceptive:2:0.05"
    with pytest.raises(ValueError):
        with_delta("tsp:20", 0.1)


def test_loglog_slope():
    xs = [1, 2, 4, 8]
    assert loglog_slope(xs, [3 * x ** 1.5 for x in xs]) == pytest.approx(1.5)


def test_spec_validation():
    with pytest.raises(ValueError):
        spec(reps=0)
    with pytest.raises(ValueError):
        spec(window=0)
