from __future__ import annotations

from typing import Mapping, Optional, Sequence

import numpy as np

from src.interfaces.IPredicate import IPredicate
from src.interfaces.IRegion import IRegion
from src.utils.interval import Interval


def _sample_interval(rng: np.random.Generator, interval: Interval) -> float:
    if interval.is_point():
        return interval.lo
    value = float(rng.uniform(interval.lo, interval.hi))
    if not interval.contains(value):
        value = (interval.lo + interval.hi) / 2.0
    return value


# Class to represent a product of intervals over some coordinates (the others are free)
class IntervalBox(IRegion):
    def __init__(self, intervals: Mapping[int, Interval], empty: bool = False):
        self._intervals = dict(sorted(intervals.items()))
        self._empty = empty or any(interval.is_empty() for interval in self._intervals.values())

    @staticmethod
    def empty() -> IntervalBox:
        return IntervalBox({}, empty=True)

    @staticmethod
    def everything() -> IntervalBox:
        return IntervalBox({})

    def intervals(self) -> dict[int, Interval]:
        return dict(self._intervals)

    def interval(self, index: int) -> Interval:
        return self._intervals.get(index, Interval.full())

    def constrained(self) -> tuple[int, ...]:
        return tuple(self._intervals)

    def restrict(self, index: int, interval: Interval) -> IntervalBox:
        intervals = dict(self._intervals)
        intervals[index] = self.interval(index).intersect(interval)
        return IntervalBox(intervals, self._empty)

    def intersect(self, other: IntervalBox) -> IntervalBox:
        result = self
        for index, interval in other.intervals().items():
            result = result.restrict(index, interval)
        return IntervalBox(result.intervals(), self._empty or other._empty)

    def adjacent_to(self, other: IntervalBox) -> bool:
        """Closures meet on every coordinate either box constrains."""
        if self.is_empty() or other.is_empty():
            return False
        indices = set(self._intervals) | set(other.intervals())
        return all(self.interval(i).closures_meet(other.interval(i)) for i in indices)

    def contains(self, x: np.ndarray) -> bool:
        if self._empty:
            return False
        return all(interval.contains(float(x[i])) for i, interval in self._intervals.items())

    def is_empty(self) -> bool:
        return self._empty

    def clipped(self, lower: np.ndarray, upper: np.ndarray) -> IntervalBox:
        return IntervalBox({i: self.interval(i).clipped(lower[i], upper[i]) for i in range(len(lower))}, self._empty)

    def sample(self, rng: np.random.Generator, lower: np.ndarray, upper: np.ndarray) -> Optional[np.ndarray]:
        clipped = self.clipped(lower, upper)
        if clipped.is_empty():
            return None
        return np.array([_sample_interval(rng, clipped.interval(i)) for i in range(len(lower))])

    def __str__(self):
        if self._empty:
            return 'empty'
        if not self._intervals:
            return 'everything'
        return ' x '.join(f"x[{i}] in {interval}" for i, interval in self._intervals.items())


class PredicateRegion(IRegion):
    """
    The set {x | pi_i(x) == truth_i for all i}, explored by rejection sampling.

    Emptiness is only reported when a sampling box is attached and `budget` draws
    from it all miss the region.
    """

    def __init__(self, literals: Sequence[tuple[IPredicate, bool]], lower: Optional[np.ndarray] = None,
                 upper: Optional[np.ndarray] = None, budget: int = 10000, seed: int = 0):
        self._literals = tuple(literals)
        self._lower = lower
        self._upper = upper
        self._budget = budget
        self._seed = seed
        self._empty: Optional[bool] = None

    def literals(self) -> tuple[tuple[IPredicate, bool], ...]:
        return self._literals

    def contains(self, x: np.ndarray) -> bool:
        return all(predicate.holds(x) == truth for predicate, truth in self._literals)

    def is_empty(self) -> bool:
        if self._lower is None or self._upper is None:
            return False
        if self._empty is None:
            self._empty = self.sample(np.random.default_rng(self._seed), self._lower, self._upper) is None
        return self._empty

    def sample(self, rng: np.random.Generator, lower: np.ndarray, upper: np.ndarray) -> Optional[np.ndarray]:
        points = rng.uniform(lower, upper, size=(self._budget, len(lower)))
        for point in points:
            if self.contains(point):
                return point
        return None

    def __str__(self):
        return ' and '.join(str(p) if truth else f"not({p})" for p, truth in self._literals) or 'everything'
