from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Interval:
    """
    A real interval with independently open or closed ends.

    Infinite ends are always open. An interval with lo > hi, or lo == hi with an
    open end, is empty.
    """
    lo: float = -math.inf
    hi: float = math.inf
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        if math.isinf(self.lo) and self.lo_closed:
            object.__setattr__(self, 'lo_closed', False)
        if math.isinf(self.hi) and self.hi_closed:
            object.__setattr__(self, 'hi_closed', False)

    @staticmethod
    def full() -> Interval:
        return Interval()

    @staticmethod
    def point(value: float) -> Interval:
        return Interval(value, value, True, True)

    @staticmethod
    def closed(lo: float, hi: float) -> Interval:
        return Interval(lo, hi, True, True)

    def is_empty(self) -> bool:
        if self.lo > self.hi:
            return True
        if self.lo == self.hi:
            return not (self.lo_closed and self.hi_closed)
        return False

    def is_point(self) -> bool:
        return self.lo == self.hi and not self.is_empty()

    def contains(self, value: float) -> bool:
        if value < self.lo or value > self.hi:
            return False
        if value == self.lo and not self.lo_closed:
            return False
        if value == self.hi and not self.hi_closed:
            return False
        return True

    def intersect(self, other: Interval) -> Interval:
        if self.lo > other.lo:
            lo, lo_closed = self.lo, self.lo_closed
        elif other.lo > self.lo:
            lo, lo_closed = other.lo, other.lo_closed
        else:
            lo, lo_closed = self.lo, self.lo_closed and other.lo_closed
        if self.hi < other.hi:
            hi, hi_closed = self.hi, self.hi_closed
        elif other.hi < self.hi:
            hi, hi_closed = other.hi, other.hi_closed
        else:
            hi, hi_closed = self.hi, self.hi_closed and other.hi_closed
        return Interval(lo, hi, lo_closed, hi_closed)

    def closure(self) -> Interval:
        return Interval(self.lo, self.hi, True, True)

    def closures_meet(self, other: Interval) -> bool:
        """True when the closures of both intervals share at least one point."""
        return not self.closure().intersect(other.closure()).is_empty()

    def abs_inf(self) -> tuple[float, bool]:
        """Infimum of |v| over the interval and whether it is attained."""
        if self.contains(0.0):
            return 0.0, True
        if self.lo >= 0.0:
            return self.lo, self.lo_closed
        return -self.hi, self.hi_closed

    def abs_sup(self) -> tuple[float, bool]:
        """Supremum of |v| over the interval and whether it is attained."""
        lo_abs, hi_abs = abs(self.lo), abs(self.hi)
        if lo_abs > hi_abs:
            return lo_abs, self.lo_closed
        if hi_abs > lo_abs:
            return hi_abs, self.hi_closed
        return hi_abs, self.lo_closed or self.hi_closed

    def clipped(self, lo: float, hi: float) -> Interval:
        return self.intersect(Interval.closed(lo, hi))

    def __str__(self):
        left = '[' if self.lo_closed else '('
        right = ']' if self.hi_closed else ')'
        return f"{left}{self.lo:g}, {self.hi:g}{right}"
