"""Fitness-tree model of a rugged landscape.

Species are arranged in levels (fitness = level index). Level 0 holds the
single primordial species every random individual belongs to. A fertile
species can evolve into ``b`` species one level up; the others are local
optima. Exactly one species per level can still reach the global optimum
(the "promising" chain, always index 0).

The module provides the model as a :class:`ProblemBinding`, a hitting-time
simulator for several selection/deletion pairings, the exact expected
hitting time of the single-individual random walk, and the rough
closed-form estimates for each scheme.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .engine import Engine, EngineConfig, StoppingRule, drive
from .problems.binding import ProblemBinding


class SpeciesId(NamedTuple):
    level: int
    index: int


@dataclass(frozen=True)
class TreeModel:
    levels: int
    branching: int
    species_per_level: int
    p: float
    parents: tuple[tuple[int, ...], ...]  # parents[l][i]: index on level l-1 (-1 at the root)
    children: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError("evolution probability must lie in (0, 1)")

    @property
    def root(self) -> SpeciesId:
        return SpeciesId(0, 0)

    @property
    def optimum(self) -> SpeciesId:
        return SpeciesId(self.levels - 1, 0)

    def level_size(self, level: int) -> int:
        return len(self.parents[level])

    def species(self):
        for lv, row in enumerate(self.parents):
            for i in range(len(row)):
                yield SpeciesId(lv, i)

    def n_species(self) -> int:
        return sum(len(r) for r in self.parents)

    def check(self, sp: SpeciesId) -> None:
        if not (0 <= sp.level < self.levels and 0 <= sp.index < len(self.parents[sp.level])):
            raise ValueError(f"{sp} outside the tree")

    def parent(self, sp: SpeciesId) -> SpeciesId | None:
        j = self.parents[sp.level][sp.index]
        return None if j < 0 else SpeciesId(sp.level - 1, j)

    def kids(self, sp: SpeciesId) -> tuple[int, ...]:
        return self.children[sp.level][sp.index]

    def fertile(self, sp: SpeciesId) -> bool:
        return bool(self.children[sp.level][sp.index])

    def promising(self, sp: SpeciesId) -> bool:
        return sp.index == 0


def build_tree(levels: int, b: int, s: int, p: float = 0.05) -> TreeModel:
    """Deterministic tree: the first ``ceil(s/b)`` species of every level
    below the penultimate one are fertile, each with exactly ``b``
    children.

    Levels therefore grow as ``b, b^2, ...`` until they saturate at
    ``b * ceil(s/b)`` species (which is ``s`` when ``b`` divides ``s``).
    The top level is the single global optimum. Its parent, the promising
    penultimate species, still draws among ``b`` offspring slots, but only
    the first one exists; the other penultimate species are local optima.
    """
    if levels < 2:
        raise ValueError("need at least two levels")
    if b < 2:
        raise ValueError("branching factor must be >= 2")
    if s < b:
        raise ValueError(f"species per level ({s}) must be >= branching factor ({b})")
    per_level_fertile = math.ceil(s / b)
    parents: list[tuple[int, ...]] = [(-1,)]
    children: list[tuple[tuple[int, ...], ...]] = []
    for lv in range(levels - 1):
        n = len(parents[lv])
        last = lv == levels - 2
        nf = 1 if last else min(n, per_level_fertile)
        row, nxt = [], []
        for i in range(n):
            if last and i == 0:
                row.append((0,))
                nxt.append(0)
            elif i < nf:
                row.append(tuple(range(len(nxt), len(nxt) + b)))
                nxt.extend([i] * b)
            else:
                row.append(())
        children.append(tuple(row))
        parents.append(tuple(nxt))
    children.append(tuple(() for _ in parents[-1]))
    return TreeModel(levels, b, s, p, tuple(parents), tuple(children))


def tree_mutate(sp: SpeciesId, model: TreeModel, rng) -> SpeciesId:
    """One mutation: evolve with probability ``p`` (local optima devolve
    on that draw instead), otherwise devolve with probability ``p``,
    otherwise stay. Evolution picks one of ``b`` offspring slots
    uniformly; an empty slot (only below the optimum) leaves the species
    unchanged. Devolution goes to the parent; the root stays put."""
    if rng.random() < model.p:
        kids = model.kids(sp)
        if kids:
            r = rng.randrange(model.branching)
            return SpeciesId(sp.level + 1, kids[r]) if r < len(kids) else sp
        return model.parent(sp) or sp
    if rng.random() < model.p:
        return model.parent(sp) or sp
    return sp


def _no_crossover(a, b, rng):
    raise RuntimeError("the tree model has no crossover")


def tree_problem(model: TreeModel) -> ProblemBinding:
    top = model.levels - 1
    return ProblemBinding(
        name=f"tree:{model.levels}:{model.branching}:{model.species_per_level}:{model.p:g}",
        random_genome=lambda rng: model.root,
        mutate=lambda sp, rng: tree_mutate(sp, model, rng),
        crossover=_no_crossover,
        fitness=lambda sp: float(sp.level),
        bounds=(0.0, float(top)),
        target_reached=lambda f: f >= top,
        epsilon=1.0,
        n_levels=model.levels,
    )


# ---------------------------------------------------------------------------
# hitting times
# ---------------------------------------------------------------------------

SCHEMES = {
    "rw": ("uniform", "parent"),
    "fuss": ("fuss", "random"),
    "fuds": ("elite", "fuds"),
}


def scheme_pair(scheme: str) -> tuple[str, str]:
    """``rw | fuss | fuds | tour:<k>`` to (selection id, deletion id)."""
    if scheme in SCHEMES:
        return SCHEMES[scheme]
    if scheme.startswith("tour:"):
        return scheme, "random"
    raise ValueError(f"unknown tree scheme {scheme!r}")


@dataclass(frozen=True)
class HittingTime:
    cycles: int
    censored: bool


def _transition_rows(model: TreeModel):
    """Per species: list of (target, probability) for one mutation."""
    p = model.p
    out = {}
    for sp in model.species():
        par = model.parent(sp) or sp
        kids = model.kids(sp)
        moves: dict[SpeciesId, float] = {}
        if kids:
            b = model.branching
            for k in kids:
                moves[SpeciesId(sp.level + 1, k)] = p / b
            moves[sp] = p * (b - len(kids)) / b
        else:
            moves[par] = moves.get(par, 0.0) + p
        moves[par] = moves.get(par, 0.0) + (1 - p) * p
        moves[sp] = moves.get(sp, 0.0) + (1 - p) * (1 - p)
        out[sp] = moves
    return out


def random_walk_expected_time(model: TreeModel) -> float:
    """Exact expected number of mutations for a single walker started at
    the root to first reach the optimum (absorbing-chain solve)."""
    rows = _transition_rows(model)
    states = [sp for sp in model.species() if sp != model.optimum]
    pos = {sp: i for i, sp in enumerate(states)}
    n = len(states)
    a = np.eye(n)
    for sp in states:
        for tgt, pr in rows[sp].items():
            if tgt in pos:
                a[pos[sp], pos[tgt]] -= pr
    t = np.linalg.solve(a, np.ones(n))
    return float(t[pos[model.root]])


def _random_walk_fast(model: TreeModel, rng, max_cycles: int) -> HittingTime:
    """Same chain as the capacity-1 engine run, but stays are skipped with
    a geometric draw instead of being simulated one by one."""
    rows = _transition_rows(model)
    jumps = {}
    for sp, moves in rows.items():
        stay = moves.get(sp, 0.0)
        leave = [(t, pr) for t, pr in moves.items() if t != sp]
        jumps[sp] = (1.0 - stay, [t for t, _ in leave], [pr for _, pr in leave])
    sp = model.root
    cycles = 0
    while sp != model.optimum:
        q, targets, weights = jumps[sp]
        u = 1.0 - rng.random()
        cycles += int(math.log(u) / math.log1p(-q)) + 1 if q < 1 else 1
        if cycles >= max_cycles:
            return HittingTime(max_cycles, True)
        sp = rng.choices(targets, weights)[0]
    return HittingTime(cycles, False)


def simulate_hitting_time(model: TreeModel, scheme: str, capacity: int, rng,
                          max_cycles: int = 10_000_000, fast: bool = True) -> HittingTime:
    """Mutation-only cycles until the optimum species is first created.

    Every run starts from a population of primordial individuals. The
    random walk (``rw``) always uses capacity 1; with ``fast`` it skips
    the engine and samples the equivalent jump chain.
    """
    sel, dele = scheme_pair(scheme)
    if scheme == "rw":
        capacity = 1
        if fast:
            return _random_walk_fast(model, rng, max_cycles)
    cfg = EngineConfig(capacity=capacity, selection=sel, deletion=dele,
                       crossover_probability=0.0, mutation_probability=1.0)
    eng = Engine(tree_problem(model), cfg, rng)
    eng.seed_population()
    rec = drive(eng, StoppingRule(max_cycles=max_cycles, target=True))
    if rec.T_target is None:
        return HittingTime(rec.cycles, True)
    return HittingTime(rec.T_target - cfg.initial_size, False)


def mean_hitting_time(model: TreeModel, scheme: str, capacity: int, reps: int,
                      seed: int = 0, max_cycles: int = 10_000_000) -> tuple[float, int]:
    """Mean over ``reps`` runs seeded ``seed + r``; censored runs enter at
    the cap. Returns (mean, number censored)."""
    times = [simulate_hitting_time(model, scheme, capacity, random.Random(seed + r), max_cycles)
             for r in range(reps)]
    return sum(t.cycles for t in times) / reps, sum(t.censored for t in times)


def heuristic_times(levels: int, b: int, s: int, p: float, capacity: int) -> dict[str, float]:
    """Order-of-magnitude estimates for random walk, FUSS, elitist+FUDS
    and standard (takeover-limited) selection."""
    bp = b / p
    return {
        "T_RW": bp ** levels,
        "T_FUSS": 0.5 * levels ** 2 * s * bp,
        "T_FUDS": 2 * levels * s * bp,
        "T_STD": levels * capacity * bp,
    }
