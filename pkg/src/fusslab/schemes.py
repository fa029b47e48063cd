"""Selection and deletion schemes.

Selection: uniform, tournament, fitness uniform (FUSS), scale-independent
level selection and its correlated pair form, plus the elitist "half top"
selector used by the fitness-tree model.

Deletion: random, fitness uniform (FUDS, binned), closest-fitness pair,
scale-independent (binned), and replace-parent.

Every function takes an explicit ``rng`` exposing the :mod:`random`
interface (``random()``, ``randrange()``, ``uniform()``).
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from functools import lru_cache
from itertools import accumulate

import numpy as np

from .population import FitnessLevelSet, Individual, Population, fitness_level_index

# ---------------------------------------------------------------------------
# selection
# ---------------------------------------------------------------------------


def select_uniform(population: Population, rng) -> Individual:
    if not len(population):
        raise ValueError("cannot select from an empty population")
    return population.member(rng.randrange(len(population)))


def select_tournament(population: Population, k: int, rng) -> Individual:
    """Draw ``k`` members with replacement and return a fittest one.

    Ties among the drawn entries are broken uniformly (with multiplicity).
    """
    n = len(population)
    if not n:
        raise ValueError("cannot select from an empty population")
    if k < 1:
        raise ValueError("tournament size must be >= 1")
    winners = [population.member(rng.randrange(n))]
    for _ in range(k - 1):
        cand = population.member(rng.randrange(n))
        if cand.fitness > winners[0].fitness:
            winners = [cand]
        elif cand.fitness == winners[0].fitness:
            winners.append(cand)
    if len(winners) == 1:
        return winners[0]
    return winners[rng.randrange(len(winners))]


def _fuss_interval(population: Population, epsilon: float) -> tuple[float, float, float]:
    lv = FitnessLevelSet(population.f_min, population.f_max, epsilon, len(population))
    half = 0.5 * lv.effective_epsilon
    return lv.f_min - half, lv.f_max + half, half


def select_fuss(population: Population, rng, epsilon: float = 0.0) -> Individual:
    """Fitness uniform selection.

    Draws ``u`` uniformly in ``[f_min - eps/2, f_max + eps/2]`` and returns a
    uniformly chosen member among those with fitness nearest to ``u``.
    ``epsilon=0`` uses the effective spacing ``(f_max - f_min)/(|P| - 1)``.
    """
    if not len(population):
        raise ValueError("cannot select from an empty population")
    if population.f_min == population.f_max:
        return select_uniform(population, rng)
    lo, hi, _ = _fuss_interval(population, epsilon)
    u = rng.uniform(lo, hi)
    return population.pick_at_fitness(population.nearest_fitnesses(u), rng)


def fuss_selection_probabilities(population: Population,
                                 epsilon: float = 0.0) -> dict[Individual, float]:
    """Exact per-member probabilities of :func:`select_fuss`.

    Each distinct fitness owns the part of the sampling interval closer to
    it than to any other value; its members share that mass equally.
    """
    if not len(population):
        raise ValueError("empty population")
    occ = population.occupancy()
    values = sorted(occ)
    if len(values) == 1:
        p = 1.0 / len(population)
        return {m: p for m in population}
    lo, hi, _ = _fuss_interval(population, epsilon)
    width = hi - lo
    mass = {}
    for i, v in enumerate(values):
        left = lo if i == 0 else 0.5 * (values[i - 1] + v)
        right = hi if i == len(values) - 1 else 0.5 * (v + values[i + 1])
        mass[v] = (right - left) / width
    return {m: mass[m.fitness] / occ[m.fitness] for m in population}


@dataclass(frozen=True)
class SelectionWeights:
    """Level probabilities ``p(f) = c/ln L * 1/(|f_max - f|/eps + 1)``.

    ``levels`` ascend, so the largest probability is the last one.
    """

    levels: tuple[float, ...]
    probs: tuple[float, ...]
    normalizer: float

    @property
    def c(self) -> float:
        return self.normalizer * math.log(len(self.levels))


@lru_cache(maxsize=64)
def _si_probs(L: int) -> tuple[tuple[float, ...], float]:
    # weight of level k (0 = lowest) is 1/(L - k)
    w = [1.0 / (L - k) for k in range(L)]
    z = math.fsum(w)
    return tuple(x / z for x in w), 1.0 / z


@lru_cache(maxsize=64)
def _si_cumulative(L: int) -> list[float]:
    return list(accumulate(_si_probs(L)[0]))


def scale_independent_weights(level_set: FitnessLevelSet) -> SelectionWeights:
    L = level_set.level_count
    probs, z = _si_probs(L)
    return SelectionWeights(tuple(level_set.levels()), probs, z)


@dataclass(frozen=True)
class PairWeights:
    """Correlated level-pair tables: ``joint_tilde`` before and ``joint``
    after the diagonal correction that makes every marginal exactly ``1/L``.
    """

    levels: tuple[float, ...]
    joint_tilde: np.ndarray
    joint: np.ndarray


@lru_cache(maxsize=8)
def _pair_tables(L: int) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(L)
    dist = np.abs(k[:, None] - k[None, :])
    tilde = 1.0 / (2.0 * L * math.log(L)) / (dist + 1.0)
    joint = tilde.copy()
    joint[k, k] += 1.0 / L - tilde.sum(axis=1)
    tilde.setflags(write=False)
    joint.setflags(write=False)
    return tilde, joint


@lru_cache(maxsize=8)
def _pair_row_cumulative(L: int) -> np.ndarray:
    _, joint = _pair_tables(L)
    cum = np.cumsum(joint * L, axis=1)
    cum.setflags(write=False)
    return cum


def scale_independent_pair_weights(level_set: FitnessLevelSet) -> PairWeights | None:
    """Pair tables over the level set, or ``None`` when ``L < 3``.

    ``None`` tells the caller to fall back to independent fitness uniform
    draws.
    """
    L = level_set.level_count
    if L < 3:
        return None
    tilde, joint = _pair_tables(L)
    return PairWeights(tuple(level_set.levels()), tilde, joint)


def _population_levels(population: Population, epsilon: float) -> FitnessLevelSet:
    return FitnessLevelSet(population.f_min, population.f_max, epsilon, len(population))


def _member_near(population: Population, f: float, rng) -> Individual:
    return population.pick_at_fitness(population.nearest_fitnesses(f), rng)


def select_scale_independent(population: Population, rng, epsilon: float = 0.0) -> Individual:
    """Draw a level of the occupied range with scale-independent weights,
    then a member nearest to it."""
    if not len(population):
        raise ValueError("cannot select from an empty population")
    lv = _population_levels(population, epsilon)
    L = lv.level_count
    if L == 1:
        return select_uniform(population, rng)
    cum = _si_cumulative(L)
    k = min(bisect_right(cum, rng.random() * cum[-1]), L - 1)
    return _member_near(population, lv.f_min + k * lv.effective_epsilon, rng)


def select_pair_scale_independent(population: Population, rng,
                                  epsilon: float = 0.0) -> tuple[Individual, Individual]:
    """Correlated parent pair.

    The first level is uniform (the exact marginal of the corrected table),
    the second is drawn from its conditional row. Each level value is then
    resolved to a nearest member independently, so self-pairing can occur.
    """
    if not len(population):
        raise ValueError("cannot select from an empty population")
    lv = _population_levels(population, epsilon)
    L = lv.level_count
    if L < 3:
        return select_fuss(population, rng, epsilon), select_fuss(population, rng, epsilon)
    cum = _pair_row_cumulative(L)
    i = rng.randrange(L)
    row = cum[i]
    j = min(int(np.searchsorted(row, rng.random() * row[-1], side="right")), L - 1)
    eps = lv.effective_epsilon
    return (_member_near(population, lv.f_min + i * eps, rng),
            _member_near(population, lv.f_min + j * eps, rng))


def select_elite_half(population: Population, rng) -> Individual:
    """Half the time a member of the top fitness level, otherwise a uniform
    member from below it."""
    if not len(population):
        raise ValueError("cannot select from an empty population")
    top = population.f_max
    a, b = population.level_range(top)
    if a == 0:
        return select_uniform(population, rng)
    idx = population.fitness_index
    if rng.random() < 0.5:
        return population.by_uid(idx[a + rng.randrange(b - a)][1])
    return population.by_uid(idx[rng.randrange(a)][1])


# ---------------------------------------------------------------------------
# deletion
# ---------------------------------------------------------------------------


def delete_random(population: Population, rng) -> Individual:
    if not len(population):
        raise ValueError("cannot delete from an empty population")
    return population.remove(select_uniform(population, rng))


def _binned(population: Population, bounds, nbins: int) -> list[list[Individual]]:
    if population.bin_spec == (tuple(bounds), nbins):
        return [population.bin_members(b) for b in range(nbins)]
    bins: list[list[Individual]] = [[] for _ in range(nbins)]
    for m in population:
        bins[fitness_level_index(m.fitness, bounds, nbins)].append(m)
    return bins


def fuds_target_bin(counts) -> int:
    """Lowest bin among those holding the most members."""
    top = max(counts)
    return next(i for i, c in enumerate(counts) if c == top)


def delete_fuds(population: Population, bounds: tuple[float, float], nbins: int,
                rng) -> Individual:
    """Fitness uniform deletion: remove a random member of the fullest bin,
    preferring the lowest bin on ties."""
    if not len(population):
        raise ValueError("cannot delete from an empty population")
    if population.bin_spec == (tuple(bounds), nbins):
        slot = population.bin_members(population.fullest_bin())
    else:
        bins = _binned(population, bounds, nbins)
        slot = bins[fuds_target_bin([len(s) for s in bins])]
    return population.remove(slot[rng.randrange(len(slot))])


def delete_closest_pair(population: Population, rng) -> Individual:
    """Remove one member of a closest-fitness adjacent pair.

    Tied minimal gaps are resolved uniformly, as is the choice within the
    pair.
    """
    n = len(population)
    if n < 2:
        raise ValueError("closest-pair deletion needs at least two members")
    idx = population.fitness_index
    best = math.inf
    ties: list[int] = []
    prev = idx[0][0]
    for i in range(1, n):
        f = idx[i][0]
        gap = f - prev
        prev = f
        if gap < best:
            best = gap
            ties = [i]
        elif gap == best:
            ties.append(i)
    i = ties[rng.randrange(len(ties))] if len(ties) > 1 else ties[0]
    j = i - rng.randrange(2)
    return population.remove(population.by_uid(idx[j][1]))


def scale_independent_targets(counts) -> list[float]:
    """Per-bin target masses following scale-independent weights over the
    occupied bin range, peaked at the top occupied bin. Bins outside the
    occupied range get target 0."""
    occupied = [i for i, c in enumerate(counts) if c]
    targets = [0.0] * len(counts)
    if not occupied:
        return targets
    low, high = occupied[0], occupied[-1]
    probs, _ = _si_probs(high - low + 1)
    total = sum(counts)
    for k, p in enumerate(probs):
        targets[low + k] = total * p
    return targets


def delete_scale_independent(population: Population, bounds: tuple[float, float],
                             nbins: int, rng) -> Individual:
    """Remove a random member of the bin with the largest excess over its
    scale-independent target; ties go to the lowest bin."""
    if not len(population):
        raise ValueError("cannot delete from an empty population")
    bins = _binned(population, bounds, nbins)
    counts = [len(s) for s in bins]
    targets = scale_independent_targets(counts)
    excess = [c - t if c else -math.inf for c, t in zip(counts, targets)]
    top = max(excess)
    tol = 1e-9 * max(1.0, abs(top))
    b = next(i for i, e in enumerate(excess) if e >= top - tol)
    slot = bins[b]
    return population.remove(slot[rng.randrange(len(slot))])


# ---------------------------------------------------------------------------
# scheme objects and identifiers
# ---------------------------------------------------------------------------


class Selection:
    """Base selection scheme; subclasses override :meth:`select`."""

    id = "?"
    pair = False

    def select(self, population: Population, rng) -> Individual:
        raise NotImplementedError

    def select_pair(self, population: Population, rng) -> tuple[Individual, Individual]:
        return self.select(population, rng), self.select(population, rng)

    @property
    def tournament_size(self) -> int | None:
        return None

    def __repr__(self):
        return f"<{type(self).__name__} {self.id}>"


class UniformSelection(Selection):
    id = "uniform"

    def select(self, population, rng):
        return select_uniform(population, rng)


class TournamentSelection(Selection):
    def __init__(self, k: int):
        if k < 1:
            raise ValueError("tournament size must be >= 1")
        self.k = k
        self.id = f"tour:{k}"

    @property
    def tournament_size(self):
        return self.k

    def select(self, population, rng):
        return select_tournament(population, self.k, rng)


class FussSelection(Selection):
    id = "fuss"

    def __init__(self, epsilon: float = 0.0):
        self.epsilon = epsilon

    def select(self, population, rng):
        return select_fuss(population, rng, self.epsilon)


class ScaleIndependentSelection(Selection):
    id = "sis"

    def __init__(self, epsilon: float = 0.0):
        self.epsilon = epsilon

    def select(self, population, rng):
        return select_scale_independent(population, rng, self.epsilon)


class ScaleIndependentPairSelection(Selection):
    id = "sisp"
    pair = True

    def __init__(self, epsilon: float = 0.0):
        self.epsilon = epsilon

    def select(self, population, rng):
        # single parent: the uniform level marginal of the pair table
        lv = _population_levels(population, self.epsilon)
        L = lv.level_count
        if L < 3:
            return select_fuss(population, rng, self.epsilon)
        k = rng.randrange(L)
        return _member_near(population, lv.f_min + k * lv.effective_epsilon, rng)

    def select_pair(self, population, rng):
        return select_pair_scale_independent(population, rng, self.epsilon)


class EliteHalfSelection(Selection):
    id = "elite"

    def select(self, population, rng):
        return select_elite_half(population, rng)


class Deletion:
    """Base deletion scheme. ``delete`` removes and returns one member."""

    id = "?"
    binned = False

    def delete(self, population: Population, rng, parent: Individual | None = None) -> Individual:
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.id}>"


class RandomDeletion(Deletion):
    id = "random"

    def delete(self, population, rng, parent=None):
        return delete_random(population, rng)


class _BinnedDeletion(Deletion):
    binned = True

    def __init__(self, nbins: int | None = None):
        self.nbins = nbins

    def _spec(self, population):
        spec = population.bin_spec
        if spec is None:
            raise ValueError(f"{self.id} deletion needs a binned population")
        return spec


class FudsDeletion(_BinnedDeletion):
    id = "fuds"

    def delete(self, population, rng, parent=None):
        bounds, nbins = self._spec(population)
        return delete_fuds(population, bounds, nbins, rng)


class ScaleIndependentDeletion(_BinnedDeletion):
    id = "sid"

    def delete(self, population, rng, parent=None):
        bounds, nbins = self._spec(population)
        return delete_scale_independent(population, bounds, nbins, rng)


class ClosestPairDeletion(Deletion):
    id = "closest"

    def delete(self, population, rng, parent=None):
        return delete_closest_pair(population, rng)


class ReplaceParentDeletion(Deletion):
    """Delete the (first) parent of the child just inserted."""

    id = "parent"

    def delete(self, population, rng, parent=None):
        if parent is None or parent not in population:
            return delete_random(population, rng)
        return population.remove(parent)


def parse_selection(text: str, epsilon: float = 0.0) -> Selection:
    """Build a selection scheme from ``uniform | tour:<k> | fuss | sis | sisp | elite``."""
    name, _, arg = text.strip().partition(":")
    name = name.lower()
    if name in ("uniform", "rand"):
        return UniformSelection()
    if name == "tour":
        try:
            return TournamentSelection(int(arg or 2))
        except ValueError:
            raise ValueError(f"bad tournament size in {text!r}") from None
    if name == "fuss":
        return FussSelection(epsilon)
    if name == "sis":
        return ScaleIndependentSelection(epsilon)
    if name == "sisp":
        return ScaleIndependentPairSelection(epsilon)
    if name == "elite":
        return EliteHalfSelection()
    raise ValueError(f"unknown selection scheme {text!r}")


def parse_deletion(text: str) -> Deletion:
    """Build a deletion scheme from ``random | fuds | closest | sid | parent``."""
    name = text.strip().lower()
    if name == "random":
        return RandomDeletion()
    if name == "fuds":
        return FudsDeletion()
    if name == "closest":
        return ClosestPairDeletion()
    if name == "sid":
        return ScaleIndependentDeletion()
    if name == "parent":
        return ReplaceParentDeletion()
    raise ValueError(f"unknown deletion scheme {text!r}")
