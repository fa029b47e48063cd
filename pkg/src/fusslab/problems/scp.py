"""Set covering with greedy repair, flip mutation and fusion-style crossover.

Selections are frozensets of zero-based column indices. Every operator
returns a feasible, irredundant selection.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .binding import ProblemBinding


@dataclass(frozen=True)
class ScpInstance:
    costs: tuple[float, ...]
    cover: tuple[tuple[int, ...], ...]  # per row: covering columns
    _matrix: np.ndarray = field(init=False, repr=False, compare=False)
    _cols: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.costs)
        if any(c <= 0 for c in self.costs):
            raise ValueError("column costs must be positive")
        m = np.zeros((len(self.cover), n), dtype=bool)
        for i, row in enumerate(self.cover):
            if not row:
                raise ValueError(f"row {i} has no covering column")
            for j in row:
                if not 0 <= j < n:
                    raise ValueError(f"row {i} references column {j} outside 0..{n - 1}")
                m[i, j] = True
        m.setflags(write=False)
        object.__setattr__(self, "_matrix", m)
        cols = tuple(tuple(np.flatnonzero(m[:, j]).tolist()) for j in range(n))
        object.__setattr__(self, "_cols", cols)

    @property
    def m(self) -> int:
        return len(self.cover)

    @property
    def n(self) -> int:
        return len(self.costs)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    def rows_of(self, j: int) -> tuple[int, ...]:
        return self._cols[j]

    def cost(self, sel) -> float:
        return float(sum(self.costs[j] for j in sel))

    def is_feasible(self, sel) -> bool:
        if not sel:
            return self.m == 0
        return bool(self._matrix[:, sorted(sel)].any(axis=1).all())


def scp_fitness(sel, instance: ScpInstance) -> float:
    """Reciprocal of the cover cost; the selection must be feasible."""
    if not instance.is_feasible(sel):
        raise ValueError("selection does not cover every row")
    return 1.0 / instance.cost(sel)


def _coverage(sel, instance: ScpInstance) -> np.ndarray:
    cnt = np.zeros(instance.m, dtype=np.int64)
    for j in sel:
        cnt[list(instance.rows_of(j))] += 1
    return cnt


def scp_repair(sel, instance: ScpInstance) -> frozenset[int]:
    """Make ``sel`` feasible and irredundant.

    Columns are added greedily by lowest cost per newly covered row (lowest
    index on ties); then, in decreasing cost order, every column whose rows
    are all covered by other chosen columns is dropped.
    """
    chosen = set(sel)
    cnt = _coverage(chosen, instance)
    M = instance.matrix
    costs = np.asarray(instance.costs, dtype=float)
    uncovered = cnt == 0
    while uncovered.any():
        gain = M[uncovered].sum(axis=0)
        ratio = np.where(gain > 0, costs / np.maximum(gain, 1), np.inf)
        j = int(np.argmin(ratio))
        chosen.add(j)
        cnt[list(instance.rows_of(j))] += 1
        uncovered = cnt == 0
    for j in sorted(chosen, key=lambda c: (-instance.costs[c], c)):
        rows = list(instance.rows_of(j))
        if (cnt[rows] >= 2).all():
            chosen.discard(j)
            cnt[rows] -= 1
    return frozenset(chosen)


def is_irredundant(sel, instance: ScpInstance) -> bool:
    cnt = _coverage(sel, instance)
    return not any((cnt[list(instance.rows_of(j))] >= 2).all() for j in sel)


def scp_random(instance: ScpInstance, rng) -> frozenset[int]:
    """A random column subset (each column with probability 1/2), repaired."""
    return scp_repair({j for j in range(instance.n) if rng.random() < 0.5}, instance)


def scp_mutate(sel, instance: ScpInstance, rng) -> frozenset[int]:
    """Flip one uniformly chosen column in or out, then repair."""
    j = rng.randrange(instance.n)
    out = set(sel)
    if j in out:
        out.remove(j)
    else:
        out.add(j)
    return scp_repair(out, instance)


def scp_crossover(s1, s2, instance: ScpInstance, rng) -> frozenset[int]:
    """Keep columns present in both parents, keep each column present in
    exactly one with probability 1/2, then repair."""
    child = set(s1) & set(s2)
    for j in sorted(set(s1) ^ set(s2)):
        if rng.random() < 0.5:
            child.add(j)
    return scp_repair(child, instance)


def scp_problem(instance: ScpInstance, name: str = "scp") -> ProblemBinding:
    # cost lower bound: the dearest of the per-row cheapest covers
    lb = max(min(instance.costs[j] for j in row) for row in instance.cover)
    ub = float(sum(instance.costs))
    return ProblemBinding(
        name=name,
        random_genome=lambda rng: scp_random(instance, rng),
        mutate=lambda s, rng: scp_mutate(s, instance, rng),
        crossover=lambda a, b, rng: scp_crossover(a, b, instance, rng),
        fitness=lambda s: 1.0 / instance.cost(s),
        bounds=(1.0 / ub, 1.0 / lb),
        raw=lambda f: 1.0 / f,
        maximize_raw=False,
    )
