"""MAX-SAT on CNF formulas: fitness is the number of satisfied clauses."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .binding import ProblemBinding


@dataclass(frozen=True)
class CnfFormula:
    n_vars: int
    clauses: tuple[tuple[int, ...], ...]
    _vidx: np.ndarray = field(init=False, repr=False, compare=False)
    _pos: np.ndarray = field(init=False, repr=False, compare=False)
    _starts: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_vars < 1:
            raise ValueError("formula needs at least one variable")
        vidx, pos, starts = [], [], []
        for k, clause in enumerate(self.clauses):
            if not clause:
                raise ValueError(f"clause {k} is empty")
            starts.append(len(vidx))
            for lit in clause:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise ValueError(f"literal {lit} outside 1..{self.n_vars}")
                vidx.append(abs(lit) - 1)
                pos.append(lit > 0)
        object.__setattr__(self, "_vidx", np.array(vidx, dtype=np.intp))
        object.__setattr__(self, "_pos", np.array(pos, dtype=bool))
        object.__setattr__(self, "_starts", np.array(starts, dtype=np.intp))

    @property
    def n_clauses(self) -> int:
        return len(self.clauses)


def _check_len(a, formula: CnfFormula):
    if len(a) != formula.n_vars:
        raise ValueError(f"assignment has {len(a)} values, formula has {formula.n_vars} variables")


def sat_fitness(a, formula: CnfFormula) -> int:
    """Number of clauses with at least one true literal."""
    _check_len(a, formula)
    if not formula.clauses:
        return 0
    lit_true = np.asarray(a, dtype=bool)[formula._vidx] == formula._pos
    return int(np.logical_or.reduceat(lit_true, formula._starts).sum())


def sat_random(n_vars: int, rng) -> np.ndarray:
    return random_bits(n_vars, rng)


def random_bits(n: int, rng) -> np.ndarray:
    raw = np.frombuffer(rng.randbytes((n + 7) // 8), dtype=np.uint8)
    return np.unpackbits(raw)[:n].astype(bool)


def sat_flip_mutate(a, rng) -> np.ndarray:
    """Negate one uniformly chosen variable."""
    out = np.array(a, dtype=bool)
    i = rng.randrange(len(out))
    out[i] = not out[i]
    return out


def sat_uniform_crossover(a1, a2, rng) -> np.ndarray:
    """Each variable's value from either parent with probability 1/2."""
    if len(a1) != len(a2):
        raise ValueError("parents differ in length")
    mask = random_bits(len(a1), rng)
    return np.where(mask, a1, a2)


def hamming(a, b) -> int:
    return int(np.count_nonzero(np.asarray(a) != np.asarray(b)))


def sat_problem(formula: CnfFormula, name: str = "sat") -> ProblemBinding:
    m = formula.n_clauses
    return ProblemBinding(
        name=name,
        random_genome=lambda rng: sat_random(formula.n_vars, rng),
        mutate=sat_flip_mutate,
        crossover=sat_uniform_crossover,
        fitness=lambda a: sat_fitness(a, formula),
        bounds=(0.0, float(m)),
        target_reached=lambda f: f >= m,
        epsilon=1.0,
        n_levels=m + 1,
        hamming=hamming,
    )
