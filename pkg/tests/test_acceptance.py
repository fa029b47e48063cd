"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines interleaved
with pytest's own output; they are printed with capture disabled anyway.
Expect a total runtime of roughly twenty minutes on one core.
"""
from __future__ import annotations

import math
import random
import statistics
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from fusslab.bench import (ExperimentSpec, diversity_high_fitness, diversity_total,
                           fitness_histogram, loglog_slope, make_problem, run_experiment)
from fusslab.engine import Engine, EngineConfig, StoppingRule, drive
from fusslab.io import (format_dimacs, format_orlib_scp, parse_dimacs, parse_orlib_scp,
                        read_dimacs, read_orlib_scp)
from fusslab.population import FitnessLevelSet, Individual, Population, fitness_level_index
from fusslab.problems.binding import ProblemBinding
from fusslab.problems.sat import CnfFormula, sat_fitness
from fusslab.problems.scp import ScpInstance, is_irredundant, scp_repair
from fusslab.schemes import (fuds_target_bin, fuss_selection_probabilities,
                             scale_independent_pair_weights, scale_independent_weights,
                             select_tournament)
from fusslab.treesim import (build_tree, heuristic_times, mean_hitting_time,
                             random_walk_expected_time)

from oracles import ScriptedRng, naive_sat_count

pytestmark = pytest.mark.slow


@pytest.fixture
def verdict(capsys):
    def report(n: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, detail
    return report


# -- 1: deceptive scaling ---------------------------------------------------------------

DELTAS = (0.2, 0.1, 0.05, 0.025)
DECEPTIVE_SCHEMES = {
    "FUSS-R": ("fuss", "random", 1.0, 0.35),
    "TOUR2-R": ("tour:2", "random", 2.0, 0.4),
    "TOUR2-F": ("tour:2", "fuds", 1.0, 0.4),
    "RAND-F": ("uniform", "fuds", 1.0, 0.4),
}


def deceptive_slope(selection: str, deletion: str) -> tuple[float, list[float]]:
    cfg = EngineConfig(capacity=1000, selection=selection, deletion=deletion,
                       crossover_probability=0.25, mutation_probability=0.5, initial_size=10)
    means = []
    for d in DELTAS:
        spec = ExperimentSpec(f"deceptive:2:{d:g}", cfg, StoppingRule(target=True), reps=20)
        s = run_experiment(spec)
        assert s.censored == 0
        means.append(s.mean)
    return loglog_slope([1 / d for d in DELTAS], means), means


@pytest.mark.parametrize("label", list(DECEPTIVE_SCHEMES))
def test_criterion_1_deceptive_scaling(label, verdict):
    sel, dele, want, tol = DECEPTIVE_SCHEMES[label]
    slope, means = deceptive_slope(sel, dele)
    verdict(1, abs(slope - want) <= tol,
            f"{label} slope {slope:.3f} (want {want} +/- {tol}); "
            f"mean T {', '.join(f'{m:.0f}' for m in means)}")


# -- 2: FUSS uniformity -----------------------------------------------------------------

START = (19, 17, 15, 13, 11, 9, 7, 4, 3, 2)


def clone_problem(levels: int) -> ProblemBinding:
    return ProblemBinding(
        name=f"clones:{levels}", random_genome=lambda rng: 0, mutate=lambda g, rng: g,
        crossover=lambda a, b, rng: a, fitness=float, bounds=(0.0, levels - 1.0),
        epsilon=1.0, n_levels=levels)


def test_criterion_2_fuss_uniformity(verdict):
    levels, reps = 10, 30
    problem = clone_problem(levels)
    cfg = EngineConfig(capacity=100, selection="fuss", deletion="random",
                       crossover_probability=0.0)
    fractions = []
    for r in range(reps):
        eng = Engine(problem, cfg, random.Random(r))
        for lv, n in enumerate(START):
            for _ in range(n):
                eng.population.add(eng.evaluate(lv))
        drive(eng, StoppingRule(max_cycles=10_000))
        occ = eng.population.occupancy()
        fractions.append([occ.get(float(lv), 0) / len(eng.population) for lv in range(levels)])
    worst, bad = 0.0, []
    for lv in range(levels):
        col = [f[lv] for f in fractions]
        sigma = statistics.stdev(col) / math.sqrt(reps)
        z = abs(statistics.fmean(col) - 0.1) / sigma
        worst = max(worst, z)
        if z > 3:
            bad.append(lv)
    verdict(2, not bad, f"largest deviation {worst:.2f} sigma over {levels} levels"
            + (f"; outside 3 sigma: {bad}" if bad else ""))


# -- 3: FUSS affine invariance ----------------------------------------------------------


def test_criterion_3_fuss_affine_invariance(verdict):
    rng = random.Random(2024)
    worst = 0.0
    for case in range(100):
        n = rng.randint(1, 60)
        if case % 2:
            fs = [float(rng.randint(-20, 20)) for _ in range(n)]
        else:
            fs = [rng.uniform(-100, 100) for _ in range(n)]
        a = rng.choice([-1, 1]) * 10 ** rng.uniform(-3, 3)
        if case < 10:
            a = -abs(a)
        b = rng.uniform(-1e3, 1e3)
        pop = Population(members=[Individual(i, f) for i, f in enumerate(fs)])
        moved = Population(members=[Individual(i, a * f + b) for i, f in enumerate(fs)])
        p0 = {m.genome: p for m, p in fuss_selection_probabilities(pop).items()}
        p1 = {m.genome: p for m, p in fuss_selection_probabilities(moved).items()}
        worst = max(worst, max(abs(p0[g] - p1[g]) for g in p0))
    verdict(3, worst <= 1e-12, f"largest probability change {worst:.2e} over 100 populations")


# -- 4: scale-independent weight properties ---------------------------------------------


def test_criterion_4_scale_independent_properties(verdict):
    problems = []
    for L in range(3, 201):
        lv = FitnessLevelSet(0.0, L - 1.0, 1.0, L)
        w = scale_independent_weights(lv)
        lnL = math.log(L)
        if abs(math.fsum(w.probs) - 1) > 1e-12:
            problems.append(f"L={L} sum")
        if not lnL / (1 + lnL) <= w.c <= 1:
            problems.append(f"L={L} c={w.c}")
        if min(w.probs) < 1 / (2 * L * lnL):
            problems.append(f"L={L} min p")
        pw = scale_independent_pair_weights(lv)
        j, t = pw.joint, pw.joint_tilde
        if not (np.array_equal(j, j.T) and np.array_equal(t, t.T)):
            problems.append(f"L={L} asymmetric")
        if np.abs(j.sum(axis=0) - 1 / L).max() > 1e-12 or np.abs(j.sum(axis=1) - 1 / L).max() > 1e-12:
            problems.append(f"L={L} marginals")
        if (j < t).any():
            problems.append(f"L={L} p < p~")
        if not 1 - 1 / lnL <= t.sum() <= 1:
            problems.append(f"L={L} sum p~={t.sum()}")
    verdict(4, not problems, "all properties hold for L in 3..200" if not problems
            else "; ".join(problems[:5]))


# -- 5: FUDS trace invariant ------------------------------------------------------------


class FudsAudit:
    """Checks every deletion against bins recomputed from the members."""

    def __init__(self):
        self.deletions = 0
        self.wrong = 0
        self.takeovers = 0
        self.spread = False

    def __call__(self, eng, report):
        pop = eng.population
        bounds, nbins = pop.bin_spec
        counts = [0] * nbins
        for m in pop:
            counts[fitness_level_index(m.fitness, bounds, nbins)] += 1
        if report.deleted_fitness is not None:
            self.deletions += 1
            before = counts[:]
            gone = fitness_level_index(report.deleted_fitness, bounds, nbins)
            before[gone] += 1
            if gone != fuds_target_bin(before):
                self.wrong += 1
        if self.spread and max(counts) >= pop.capacity:
            self.takeovers += 1
        if sum(c > 0 for c in counts) >= 2:
            self.spread = True


def audit_run(problem_spec: str, cfg: EngineConfig, stopping: StoppingRule) -> FudsAudit:
    audit = FudsAudit()
    spec = ExperimentSpec(problem_spec, cfg, stopping)
    run_experiment(spec, on_step=audit)
    return audit


def test_criterion_5_fuds_trace(verdict, data_dir):
    tsp = audit_run("tsp:20", EngineConfig(capacity=250, selection="tour:4", deletion="fuds"),
                    StoppingRule(stall_generations=40))
    sat = audit_run(f"sat:{data_dir / 'uf150-01.cnf'}",
                    EngineConfig(capacity=200, selection="tour:4", deletion="fuds", nbins=646),
                    StoppingRule(generations=100))
    ok = all(a.deletions > 0 and a.wrong == 0 and a.takeovers == 0 and a.spread
             for a in (tsp, sat))
    verdict(5, ok, f"TSP {tsp.deletions} deletions, {tsp.wrong} off-target, "
            f"{tsp.takeovers} takeovers; SAT {sat.deletions} deletions, {sat.wrong} off-target, "
            f"{sat.takeovers} takeovers")


# -- 6: tournament of two is linear ranking ---------------------------------------------


def test_criterion_6_tournament_linear_ranking(verdict):
    n = 10
    pop = Population(members=[Individual(i, float(i)) for i in range(n)])
    counts = Counter()
    for i in range(n):
        for j in range(n):
            counts[select_tournament(pop, 2, ScriptedRng([i, j, 0])).genome] += 1
    worst = max(abs(counts[r - 1] / n ** 2 - (2 * r - 1) / 100) for r in range(1, n + 1))
    exact = all(Fraction(counts[r - 1], n * n) == Fraction(2 * r - 1, 100)
                for r in range(1, n + 1))
    verdict(6, exact and worst <= 1e-12, f"largest deviation {worst:.1e} over {n * n} pairings")


# -- 7: TSP robustness ------------------------------------------------------------------

TSP_SEED = 12345


def tsp_summary(k: int, deletion: str):
    cfg = EngineConfig(capacity=250, selection=f"tour:{k}", deletion=deletion)
    spec = ExperimentSpec("tsp:20", cfg, StoppingRule(stall_generations=40), reps=50,
                          base_seed=TSP_SEED)
    return run_experiment(spec, make_problem("tsp:20", TSP_SEED)).stats


def test_criterion_7_tsp_robustness(verdict):
    stats = {(k, d): tsp_summary(k, d) for k in (2, 4, 6, 12) for d in ("fuds", "random")}
    f12, r12 = stats[12, "fuds"], stats[12, "random"]
    separated = f12.mean < r12.mean and f12.ci95[1] < r12.ci95[0]
    ordered = {k: stats[k, "fuds"].mean <= stats[k, "random"].mean for k in (2, 4, 6, 12)}
    table = "; ".join(f"k={k} F {stats[k, 'fuds'].mean:.3f} R {stats[k, 'random'].mean:.3f}"
                      for k in (2, 4, 6, 12))
    verdict(7, separated and all(ordered.values()),
            f"TOUR12 F ci95 [{f12.ci95[0]:.3f}, {f12.ci95[1]:.3f}] vs R "
            f"[{r12.ci95[0]:.3f}, {r12.ci95[1]:.3f}]; {table}")


# -- 8: tree model -----------------------------------------------------------------------


def test_criterion_8_heuristic_grid(verdict):
    worst = 0.0
    bad = 0
    for levels in range(2, 11):
        for b in (2, 3, 4):
            for s in range(b, 17):
                for cap in (s, s + 1, 2 * s, 50, 200, 1000):
                    if cap < s:
                        continue
                    h = heuristic_times(levels, b, s, 0.05, cap)
                    ratio = h["T_FUSS"] / h["T_STD"]
                    worst = max(worst, abs(ratio / (levels * s / (2 * cap)) - 1))
                    bad += ratio > levels / 2 * (1 + 1e-12)
    verdict(8, worst <= 1e-12 and bad == 0,
            f"heuristic ratio matches |F|s/(2|P|) to {worst:.1e}; {bad} grid points above |F|/2")


TOUR_CAP = 20_000


def test_criterion_8_random_walk_ratio(verdict):
    model = build_tree(5, 2, 4, 0.05)
    rw, _ = mean_hitting_time(model, "rw", 1, 200, seed=0)
    means = {}
    for scheme in ("fuss", "fuds"):
        means[scheme], cens = mean_hitting_time(model, scheme, 50, 200, seed=0)
        assert cens == 0
    means["tour:2"], cens = mean_hitting_time(model, "tour:2", 50, 200, seed=0,
                                              max_cycles=TOUR_CAP)
    ok = all(rw >= 10 * m for m in means.values())
    verdict(8, ok, f"RW mean {rw:.0f} (exact {random_walk_expected_time(model):.0f}); "
            + ", ".join(f"{k} {v:.0f}" for k, v in means.items())
            + f" ({cens} tour:2 runs capped at {TOUR_CAP})")


def test_criterion_8_slope_gap(verdict):
    sizes = range(3, 8)
    slopes, table = {}, {}
    for scheme in ("fuss", "fuds"):
        ms = []
        for levels in sizes:
            m, cens = mean_hitting_time(build_tree(levels, 2, 4, 0.05), scheme, 50, 50, seed=0)
            assert cens == 0
            ms.append(m)
        slopes[scheme] = loglog_slope(list(sizes), ms)
        table[scheme] = ms
    gap = slopes["fuss"] - slopes["fuds"]
    verdict(8, gap >= 0.5,
            f"FUSS slope {slopes['fuss']:.2f}, FUDS slope {slopes['fuds']:.2f}, gap {gap:.2f}; "
            + "; ".join(f"{k} " + ", ".join(f"{m:.0f}" for m in v) for k, v in table.items()))


# -- 9: parsers ---------------------------------------------------------------------------


def random_formula(rng) -> CnfFormula:
    n = rng.randint(1, 30)
    clauses = []
    for _ in range(rng.randint(1, 60)):
        w = rng.randint(1, 5)
        clauses.append(tuple(rng.choice([-1, 1]) * rng.randint(1, n) for _ in range(w)))
    used = max(abs(l) for c in clauses for l in c)
    return CnfFormula(used, tuple(clauses))


def test_criterion_9_parsers(verdict, data_dir):
    uf = read_dimacs(data_dir / "uf150-01.cnf")
    text = format_dimacs(uf)
    fix_cnf = format_dimacs(parse_dimacs(text)) == text and parse_dimacs(text) == uf
    rng = random.Random(9)
    for _ in range(200):
        f = random_formula(rng)
        t = format_dimacs(f, comments=["generated"])
        fix_cnf &= parse_dimacs(t) == f and format_dimacs(parse_dimacs(t), ["generated"]) == t
    fix_scp = True
    for name in ("scp-20x40.txt", "scp-200x1000.txt"):
        inst = read_orlib_scp(data_dir / name)
        t = format_orlib_scp(inst)
        fix_scp &= parse_orlib_scp(t) == inst and format_orlib_scp(parse_orlib_scp(t)) == t
    mismatches = 0
    for _ in range(1000):
        f = random_formula(rng)
        a = np.array([rng.random() < 0.5 for _ in range(f.n_vars)])
        mismatches += sat_fitness(a, f) != naive_sat_count(list(a), f.clauses)
    shape = (uf.n_vars, uf.n_clauses) == (150, 645)
    verdict(9, fix_cnf and fix_scp and shape and mismatches == 0,
            f"DIMACS fixpoint {fix_cnf}, OR-Library fixpoint {fix_scp}, "
            f"uf150 {uf.n_vars} vars / {uf.n_clauses} clauses, {mismatches} evaluator mismatches")


# -- 10: substitute property suites -------------------------------------------------------


def test_criterion_10_scp_repair(verdict, data_dir):
    inst: ScpInstance = read_orlib_scp(data_dir / "scp-20x40.txt")
    rng = random.Random(10)
    bad = 0
    for _ in range(100_000):
        density = rng.random()
        sel = {j for j in range(inst.n) if rng.random() < density}
        rep = scp_repair(sel, inst)
        bad += not (inst.is_feasible(rep) and is_irredundant(rep, inst))
    verdict(10, bad == 0, f"scp_repair: {bad} of 100000 random selections infeasible or redundant")


def test_criterion_10_diversity_and_histograms(verdict):
    t = lambda s: Individual(np.array([c == "T" for c in s]), 0.0)
    hand = (diversity_total([t("TTF"), t("TFF")]) == 1.0
            and diversity_total([t("TTT"), t("FFF"), t("TTT")]) == 2.0
            and diversity_total([t("TFTF")] * 3) == 0.0)
    window = [Individual(np.array([True] * 4), 100.0), Individual(np.array([False] * 4), 95.0),
              Individual(np.array([True, True, False, False]), 10.0)]
    hand &= diversity_high_fitness(window, 20) == 4.0
    rng = random.Random(11)
    sums = True
    for _ in range(1000):
        fs = [rng.uniform(-5, 5) for _ in range(rng.randint(1, 100))]
        h = fitness_histogram([Individual(None, f) for f in fs], (-5.0, 5.0), rng.randint(1, 40))
        sums &= sum(x.count for x in h) == len(fs)
    verdict(10, hand and sums, f"diversity hand examples {hand}, histogram sums {sums}")


def sat_nonzero_bins(path, deletion: str, reps: int) -> list[int]:
    problem = make_problem(f"sat:{path}")
    cfg = EngineConfig(capacity=200, selection="tour:4", deletion=deletion,
                       nbins=problem.n_levels)
    spec = ExperimentSpec(f"sat:{path}", cfg, StoppingRule(generations=100), reps=reps)
    out = run_experiment(spec, problem, keep_populations=True)
    return [sum(1 for h in fitness_histogram(p, problem.bounds, problem.n_levels) if h.count)
            for p in out.final_populations]


def test_criterion_10_sat_histogram_spread(verdict, data_dir):
    path = data_dir / "uf150-01.cnf"
    fuds = sat_nonzero_bins(path, "fuds", 30)
    rand = sat_nonzero_bins(path, "random", 30)
    wins = sum(f >= 3 * r for f, r in zip(fuds, rand))
    verdict(10, wins > 15,
            f"TOUR4-F nonzero bins >= 3x TOUR4-R in {wins}/30 reps "
            f"(median {statistics.median(fuds)} vs {statistics.median(rand)})")
