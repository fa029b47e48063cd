"""Random-distance travelling salesman problem with swap mutation and PMX."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .binding import ProblemBinding


@dataclass(frozen=True)
class TspInstance:
    dist: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        n = len(self.dist)
        if n < 2:
            raise ValueError("need at least two cities")
        for i, row in enumerate(self.dist):
            if len(row) != n:
                raise ValueError("distance matrix is not square")
            if row[i] != 0:
                raise ValueError("distance matrix diagonal must be zero")
            for j in range(i):
                if row[j] != self.dist[j][i]:
                    raise ValueError("distance matrix is not symmetric")

    @property
    def n(self) -> int:
        return len(self.dist)

    def length_bounds(self) -> tuple[float, float]:
        """Lower and upper bounds on any tour length: every city contributes
        half of two incident edges."""
        lo = hi = 0.0
        for i, row in enumerate(self.dist):
            edges = sorted(d for j, d in enumerate(row) if j != i)
            if len(edges) == 1:
                edges = edges * 2
            lo += 0.5 * (edges[0] + edges[1])
            hi += 0.5 * (edges[-1] + edges[-2])
        return lo, hi


def tsp_random_instance(n: int, rng) -> TspInstance:
    """One uniform [0, 1] draw per unordered city pair."""
    if n < 2:
        raise ValueError("need at least two cities")
    d = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d[i][j] = d[j][i] = rng.random()
    return TspInstance(tuple(tuple(r) for r in d))


def check_tour(tour, n: int) -> None:
    if len(tour) != n or set(tour) != set(range(n)):
        raise ValueError(f"tour is not a permutation of 0..{n - 1}")


def tour_length(tour, instance: TspInstance) -> float:
    d = instance.dist
    prev = tour[-1]
    total = 0.0
    for c in tour:
        total += d[prev][c]
        prev = c
    return total


def tsp_fitness(tour, instance: TspInstance) -> float:
    """Reciprocal of the closed tour length."""
    check_tour(tour, instance.n)
    return 1.0 / tour_length(tour, instance)


def tsp_random_tour(n: int, rng) -> tuple[int, ...]:
    t = list(range(n))
    rng.shuffle(t)
    return tuple(t)


def tsp_swap_mutate(tour, rng) -> tuple[int, ...]:
    """Swap the cities at two distinct uniformly chosen positions."""
    i, j = rng.sample(range(len(tour)), 2)
    t = list(tour)
    t[i], t[j] = t[j], t[i]
    return tuple(t)


def pmx(p1, p2, start: int, stop: int) -> tuple[int, ...]:
    """Partially mapped crossover keeping ``p1[start:stop]``."""
    n = len(p1)
    if len(p2) != n:
        raise ValueError("parents differ in length")
    child = [None] * n
    child[start:stop] = p1[start:stop]
    pos1 = {c: i for i, c in enumerate(p1)}
    in_seg = set(p1[start:stop])
    for i in list(range(start)) + list(range(stop, n)):
        c = p2[i]
        while c in in_seg:
            c = p2[pos1[c]]
        child[i] = c
    return tuple(child)


def tsp_pmx_crossover(p1, p2, rng) -> tuple[int, ...]:
    """PMX with the segment between two distinct uniformly drawn cut points."""
    i, j = sorted(rng.sample(range(len(p1) + 1), 2))
    return pmx(p1, p2, i, j)


def tsp_problem(instance: TspInstance, name: str | None = None) -> ProblemBinding:
    n = instance.n
    lo_len, hi_len = instance.length_bounds()

    def fitness(tour):
        return 1.0 / tour_length(tour, instance)

    return ProblemBinding(
        name=name or f"tsp:{n}",
        random_genome=lambda rng: tsp_random_tour(n, rng),
        mutate=tsp_swap_mutate,
        crossover=tsp_pmx_crossover,
        fitness=fitness,
        bounds=(1.0 / hi_len, 1.0 / lo_len),
        raw=lambda f: 1.0 / f,
        maximize_raw=False,
    )


def write_tsp(instance: TspInstance, path) -> None:
    lines = [str(instance.n)]
    lines += [" ".join(repr(x) for x in row) for row in instance.dist]
    Path(path).write_text("\n".join(lines) + "\n")


def parse_tsp(text: str) -> TspInstance:
    """Plain-text matrix: city count, then that many rows of distances."""
    tokens = text.split()
    if not tokens:
        raise ValueError("empty TSP file")
    n = int(tokens[0])
    vals = tokens[1:]
    if len(vals) != n * n:
        raise ValueError(f"expected {n * n} distances, found {len(vals)}")
    rows = tuple(tuple(float(v) for v in vals[i * n:(i + 1) * n]) for i in range(n))
    return TspInstance(rows)


def read_tsp(path) -> TspInstance:
    return parse_tsp(Path(path).read_text())
