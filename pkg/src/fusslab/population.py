"""Fitness-indexed population for steady-state evolutionary algorithms.

A :class:`Population` keeps three views of the same multiset of
individuals in sync:

* an unordered member list, for O(1) uniform draws and removal,
* a fitness index sorted by ``(fitness, uid)``, for nearest-fitness
  lookups and adjacent-gap scans,
* an optional fixed-bin histogram over ``[lo, hi]``, used by fitness
  uniform deletion.
"""
from __future__ import annotations

import math
from bisect import bisect_left, insort
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Sequence

_INF = float("inf")


@dataclass(eq=False)
class Individual:
    """A genome together with its cached fitness.

    ``uid`` is assigned by the population on insertion and is unique
    within that population. Individuals compare by identity.
    """

    genome: Any
    fitness: float
    uid: int = -1


def fitness_level_index(f: float, bounds: tuple[float, float], nbins: int) -> int:
    """Return the equal-width bin holding fitness ``f``.

    Values outside ``bounds`` clamp to the nearest edge bin, and ``f == hi``
    falls in the top bin.
    """
    lo, hi = bounds
    if not hi > lo:
        raise ValueError(f"degenerate fitness bounds {bounds!r}")
    if nbins < 1:
        raise ValueError("nbins must be >= 1")
    k = math.floor((f - lo) / (hi - lo) * nbins)
    if k < 0:
        return 0
    if k >= nbins:
        return nbins - 1
    return k


@dataclass(frozen=True)
class FitnessLevelSet:
    """Equi-spaced fitness levels ``f_min, f_min+eps, ..., f_max``.

    ``epsilon == 0`` marks continuous fitness; the effective spacing is then
    the mean neighbour gap of a fitness uniform population of ``size``
    members.
    """

    f_min: float
    f_max: float
    epsilon: float = 0.0
    size: int = 1

    def __post_init__(self):
        if self.f_min > self.f_max:
            raise ValueError("f_min > f_max")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0 (0 means continuous)")

    @property
    def effective_epsilon(self) -> float:
        if self.epsilon > 0:
            return self.epsilon
        if self.size >= 2 and self.f_max > self.f_min:
            return (self.f_max - self.f_min) / (self.size - 1)
        # single level: any positive spacing gives the same distribution
        return 1.0

    @property
    def level_count(self) -> int:
        span = self.f_max - self.f_min
        if span <= 0:
            return 1
        return int(round(span / self.effective_epsilon)) + 1

    def levels(self) -> list[float]:
        eps = self.effective_epsilon
        return [self.f_min + k * eps for k in range(self.level_count)]

    @classmethod
    def of(cls, fitnesses: Sequence[float], epsilon: float = 0.0) -> FitnessLevelSet:
        return cls(min(fitnesses), max(fitnesses), epsilon, len(fitnesses))


@dataclass
class _Bins:
    bounds: tuple[float, float]
    nbins: int
    members: list[list[Individual]] = field(default_factory=list)
    # bins grouped by occupancy, each group sorted, for O(log) fullest-bin queries
    by_count: dict[int, list[int]] = field(default_factory=dict)
    top: int = 0

    def __post_init__(self):
        self.members = [[] for _ in range(self.nbins)]
        self.by_count = {0: list(range(self.nbins))}

    def _move(self, b: int, old: int, new: int) -> None:
        group = self.by_count[old]
        del group[bisect_left(group, b)]
        if not group:
            del self.by_count[old]
            if old == self.top and new < old:
                self.top = new
        insort(self.by_count.setdefault(new, []), b)
        if new > self.top:
            self.top = new


class Population:
    """Capacity-bounded multiset of individuals with an ordered fitness index.

    Parameters
    ----------
    capacity : int or None
        Maximum steady-state size; ``None`` means unbounded. The population
        itself never deletes; the engine enforces the bound.
    bounds, nbins : optional
        If both are given, a fixed-bin fitness histogram is maintained.
    """

    def __init__(self, capacity: int | None = None,
                 bounds: tuple[float, float] | None = None,
                 nbins: int | None = None,
                 members: Iterable[Individual] = ()):
        if capacity is not None and capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._members: list[Individual] = []
        self._pos: dict[int, int] = {}
        self._index: list[tuple[float, int]] = []
        self._next_uid = 0
        self._bins: _Bins | None = None
        self._bin_of: dict[int, int] = {}
        self._bin_pos: dict[int, int] = {}
        if bounds is not None and nbins is not None:
            self._bins = _Bins(tuple(bounds), int(nbins))
        for ind in members:
            self.add(ind)

    # -- basic container protocol -------------------------------------------------

    def __len__(self) -> int:
        return len(self._members)

    def __iter__(self) -> Iterator[Individual]:
        return iter(self._members)

    def __contains__(self, ind: Individual) -> bool:
        return self._pos.get(ind.uid) is not None and self._members[self._pos[ind.uid]] is ind

    @property
    def members(self) -> Sequence[Individual]:
        return self._members

    @property
    def full(self) -> bool:
        return self.capacity is not None and len(self._members) >= self.capacity

    def member(self, i: int) -> Individual:
        return self._members[i]

    def by_uid(self, uid: int) -> Individual:
        return self._members[self._pos[uid]]

    def fitnesses(self) -> list[float]:
        return [ind.fitness for ind in self._members]

    # -- mutation ---------------------------------------------------------------------

    def add(self, ind: Individual) -> Individual:
        ind.uid = self._next_uid
        self._next_uid += 1
        self._pos[ind.uid] = len(self._members)
        self._members.append(ind)
        insort(self._index, (ind.fitness, ind.uid))
        if self._bins is not None:
            b = fitness_level_index(ind.fitness, self._bins.bounds, self._bins.nbins)
            slot = self._bins.members[b]
            self._bin_of[ind.uid] = b
            self._bin_pos[ind.uid] = len(slot)
            slot.append(ind)
            self._bins._move(b, len(slot) - 1, len(slot))
        return ind

    def remove(self, ind: Individual) -> Individual:
        uid = ind.uid
        i = self._pos.pop(uid)
        last = self._members.pop()
        if last is not ind:
            self._members[i] = last
            self._pos[last.uid] = i
        j = bisect_left(self._index, (ind.fitness, uid))
        del self._index[j]
        if self._bins is not None:
            b = self._bin_of.pop(uid)
            slot = self._bins.members[b]
            k = self._bin_pos.pop(uid)
            tail = slot.pop()
            if tail is not ind:
                slot[k] = tail
                self._bin_pos[tail.uid] = k
            self._bins._move(b, len(slot) + 1, len(slot))
        return ind

    # -- fitness index ------------------------------------------------------------------

    @property
    def fitness_index(self) -> Sequence[tuple[float, int]]:
        """Entries ``(fitness, uid)`` in ascending order."""
        return self._index

    @property
    def f_min(self) -> float:
        return self._index[0][0]

    @property
    def f_max(self) -> float:
        return self._index[-1][0]

    def best(self) -> Individual:
        return self.by_uid(self._index[-1][1])

    def level_range(self, f: float) -> tuple[int, int]:
        """Half-open span of fitness-index positions holding exactly ``f``."""
        return bisect_left(self._index, (f, -1)), bisect_left(self._index, (f, _INF))

    def distinct_fitnesses(self) -> list[float]:
        out: list[float] = []
        for f, _ in self._index:
            if not out or f != out[-1]:
                out.append(f)
        return out

    def occupancy(self) -> dict[float, int]:
        """Number of members at each distinct fitness value."""
        counts: dict[float, int] = {}
        for f, _ in self._index:
            counts[f] = counts.get(f, 0) + 1
        return counts

    def nearest_fitnesses(self, u: float) -> list[float]:
        """Distinct fitness value(s) nearest to ``u``; two only on an exact tie."""
        idx = self._index
        j = bisect_left(idx, (u, -1))
        below = idx[j - 1][0] if j > 0 else None
        above = idx[j][0] if j < len(idx) else None
        if below is None:
            return [above]
        if above is None:
            return [below]
        db, da = u - below, above - u
        if db < da:
            return [below]
        if da < db:
            return [above]
        return [below, above] if below != above else [below]

    def pick_at_fitness(self, fitnesses: Sequence[float], rng) -> Individual:
        """Uniformly pick a member whose fitness is one of ``fitnesses``."""
        spans = [self.level_range(f) for f in fitnesses]
        total = sum(b - a for a, b in spans)
        k = rng.randrange(total)
        for a, b in spans:
            if k < b - a:
                return self.by_uid(self._index[a + k][1])
            k -= b - a
        raise AssertionError("unreachable")

    # -- histogram ------------------------------------------------------------------------

    @property
    def has_bins(self) -> bool:
        return self._bins is not None

    @property
    def bin_spec(self) -> tuple[tuple[float, float], int] | None:
        if self._bins is None:
            return None
        return self._bins.bounds, self._bins.nbins

    def bin_counts(self) -> list[int]:
        if self._bins is None:
            raise ValueError("population has no fitness histogram")
        return [len(s) for s in self._bins.members]

    def fullest_bin(self) -> int:
        """Lowest-indexed bin among those holding the most members."""
        if self._bins is None:
            raise ValueError("population has no fitness histogram")
        return self._bins.by_count[self._bins.top][0]

    def bin_members(self, b: int) -> Sequence[Individual]:
        return self._bins.members[b]

    def bin_of(self, ind: Individual) -> int:
        return self._bin_of[ind.uid]

    # -- diagnostics --------------------------------------------------------------------------

    def check_integrity(self) -> None:
        """Rebuild every derived structure and compare; raise on mismatch."""
        if self.capacity is not None and len(self._members) > self.capacity + 1:
            raise AssertionError("population exceeds capacity")
        rebuilt = sorted((m.fitness, m.uid) for m in self._members)
        if rebuilt != self._index:
            raise AssertionError("fitness index out of sync with members")
        for i, m in enumerate(self._members):
            if self._pos[m.uid] != i:
                raise AssertionError("member position map corrupt")
        if self._bins is not None:
            counts = [0] * self._bins.nbins
            for m in self._members:
                b = fitness_level_index(m.fitness, self._bins.bounds, self._bins.nbins)
                if self._bin_of[m.uid] != b:
                    raise AssertionError("member filed in wrong bin")
                counts[b] += 1
            if counts != self.bin_counts():
                raise AssertionError("bin histogram out of sync")
            for c, group in self._bins.by_count.items():
                if group != sorted(b for b in range(len(counts)) if counts[b] == c):
                    raise AssertionError("occupancy groups out of sync")
            if self._bins.top != max(counts):
                raise AssertionError("fullest-bin tracker out of sync")
