"""Deceptive "features" landscape on the unit hypercube.

An individual possesses feature ``d`` when its ``d``-th coordinate lies in
the closed slab ``[a_d, a_d + width]``. Holding every feature is optimal,
holding none is a broad local optimum, and holding only some is worse
than holding none.
"""
from __future__ import annotations

from dataclasses import dataclass

from .binding import ProblemBinding


@dataclass(frozen=True)
class DeceptiveParams:
    anchors: tuple[float, ...]
    width: float

    def __post_init__(self):
        if len(self.anchors) < 2:
            raise ValueError("dimension must be >= 2")
        if not 0.0 < self.width < 1.0:
            raise ValueError("feature width must lie in (0, 1)")
        for a in self.anchors:
            if not 0.0 <= a <= 1.0 - self.width:
                raise ValueError(f"anchor {a} puts its slab outside [0, 1]")

    @property
    def dim(self) -> int:
        return len(self.anchors)

    @classmethod
    def evenly_spaced(cls, dim: int, width: float) -> DeceptiveParams:
        return cls(tuple((1.0 - width) * (d + 1) / (dim + 1) for d in range(dim)), width)

    @property
    def optimum(self) -> int:
        return 4 if self.dim == 2 else self.dim + 2


def _features(x, params: DeceptiveParams) -> list[bool]:
    if len(x) != params.dim:
        raise ValueError(f"point has {len(x)} coordinates, expected {params.dim}")
    out = []
    for xi, a in zip(x, params.anchors):
        if not 0.0 <= xi <= 1.0:
            raise ValueError(f"coordinate {xi} outside [0, 1]")
        out.append(a <= xi <= a + params.width)
    return out


def deceptive_formula(x, params: DeceptiveParams) -> int:
    """``(D+1) * prod(chi) - max_d d*chi_d + D + 1`` with 1-based ``d``."""
    chi = _features(x, params)
    D = params.dim
    prod = 1 if all(chi) else 0
    top = max((d + 1) for d, c in enumerate(chi) if c) if any(chi) else 0
    return (D + 1) * prod - top + D + 1


def deceptive_fitness(x, params: DeceptiveParams) -> int:
    """Fitness of point ``x``.

    In two dimensions this is the table: 1 with only the first feature,
    2 with only the second, 3 with neither, 4 with both. Higher dimensions
    use :func:`deceptive_formula`.
    """
    if params.dim != 2:
        return deceptive_formula(x, params)
    f1, f2 = _features(x, params)
    if f1 and f2:
        return 4
    if f1:
        return 1
    if f2:
        return 2
    return 3


def deceptive_random(params: DeceptiveParams, rng) -> tuple[float, ...]:
    return tuple(rng.random() for _ in range(params.dim))


def deceptive_mutate(x, rng) -> tuple[float, ...]:
    """Replace one uniformly chosen coordinate by a fresh uniform draw."""
    d = rng.randrange(len(x))
    y = list(x)
    y[d] = rng.random()
    return tuple(y)


def deceptive_crossover(p, q, rng) -> tuple[float, ...]:
    """2D: first coordinate of ``p`` with second of ``q``. Higher dimensions:
    every coordinate independently from either parent."""
    if len(p) != len(q):
        raise ValueError("parents differ in dimension")
    if len(p) == 2:
        return (p[0], q[1])
    return tuple(a if rng.random() < 0.5 else b for a, b in zip(p, q))


def deceptive_problem(params: DeceptiveParams) -> ProblemBinding:
    opt = params.optimum
    return ProblemBinding(
        name=f"deceptive:{params.dim}:{params.width:g}",
        random_genome=lambda rng: deceptive_random(params, rng),
        mutate=deceptive_mutate,
        crossover=deceptive_crossover,
        fitness=lambda x: deceptive_fitness(x, params),
        bounds=(1.0, float(opt)),
        target_reached=lambda f: f >= opt,
        epsilon=1.0,
        n_levels=opt,
    )
