from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Mapping, Optional

import numpy as np

from src.interfaces.IPredicate import IPredicate
from src.utils.interval import Interval


class Relation(Enum):
    GE = '>='
    GT = '>'

    def holds(self, value: float) -> bool:
        if self is Relation.GE:
            return value >= 0.0
        return value > 0.0


# Registered nonlinear functions g(x, **params) and their optional box checks.
_PREDICATE_FUNCTIONS: dict[str, Callable[..., float]] = {}
_BOX_CHECKS: dict[str, Callable[..., Optional[bool]]] = {}


def register_predicate_function(name: str, box_check: Optional[Callable[..., Optional[bool]]] = None):
    """
    Register a nonlinear predicate function under `name`.

    Args:
        name (str): Registry key used by NamedPredicate.
        box_check (Callable, optional): `check(box, relation, **params) -> bool | None` deciding
            whether g ~ 0 is satisfiable on an interval box (None when undecided).
    """
    def decorator(fn):
        _PREDICATE_FUNCTIONS[name] = fn
        if box_check is not None:
            _BOX_CHECKS[name] = box_check
        return fn
    return decorator


def registered_predicate_functions() -> list[str]:
    return sorted(_PREDICATE_FUNCTIONS)


class AffinePredicate(IPredicate):
    """
    Predicate a·x + b ~ 0 with sparse coefficients.

    Args:
        coefficients (Mapping[int, float]): Coordinate index to coefficient a_i.
        constant (float): The constant b.
        relation (Relation): >= or >.
        label (str, optional): Human-readable form used in logs and exports.
    """

    def __init__(self, coefficients: Mapping[int, float], constant: float, relation: Relation = Relation.GE, label: Optional[str] = None):
        items = sorted((int(i), float(a)) for i, a in coefficients.items() if a != 0.0)
        self._indices = np.array([i for i, _ in items], dtype=int)
        self._coefficients = np.array([a for _, a in items], dtype=float)
        self._constant = float(constant)
        self._relation = relation
        self._label = label or self._default_label()

    @staticmethod
    def at_least(index: int, threshold: float, label: Optional[str] = None) -> AffinePredicate:
        """x_index - threshold >= 0"""
        return AffinePredicate({index: 1.0}, -threshold, Relation.GE, label)

    @staticmethod
    def above(index: int, threshold: float, label: Optional[str] = None) -> AffinePredicate:
        """x_index - threshold > 0"""
        return AffinePredicate({index: 1.0}, -threshold, Relation.GT, label)

    @staticmethod
    def at_most(index: int, threshold: float, label: Optional[str] = None) -> AffinePredicate:
        """threshold - x_index >= 0"""
        return AffinePredicate({index: -1.0}, threshold, Relation.GE, label)

    @staticmethod
    def below(index: int, threshold: float, label: Optional[str] = None) -> AffinePredicate:
        """threshold - x_index > 0"""
        return AffinePredicate({index: -1.0}, threshold, Relation.GT, label)

    @staticmethod
    def top() -> AffinePredicate:
        return AffinePredicate({}, 1.0, Relation.GE, 'T')

    def coefficients(self) -> dict[int, float]:
        return dict(zip(self._indices.tolist(), self._coefficients.tolist()))

    def constant(self) -> float:
        return self._constant

    def relation(self) -> Relation:
        return self._relation

    def value(self, x: np.ndarray) -> float:
        if len(self._indices) == 0:
            return self._constant
        return float(np.dot(self._coefficients, x[self._indices])) + self._constant

    def holds(self, x: np.ndarray) -> bool:
        return self._relation.holds(self.value(x))

    def support(self) -> tuple[int, ...]:
        return tuple(self._indices.tolist())

    def is_constant(self) -> bool:
        return len(self._indices) == 0

    def is_single_coordinate(self) -> bool:
        return len(self._indices) == 1

    def interval(self, truth: bool = True) -> Interval:
        """
        The set of values of the single coordinate on which the predicate has the given truth value.

        Raises:
            ValueError: if the predicate does not depend on exactly one coordinate.
        """
        if not self.is_single_coordinate():
            raise ValueError(f"{self} is not a single-coordinate predicate")
        a = float(self._coefficients[0])
        threshold = -self._constant / a
        strict = self._relation is Relation.GT
        if not truth:
            # not(g >= 0) is g < 0 and not(g > 0) is g <= 0
            strict = not strict
            a = -a
        if a > 0:
            return Interval(threshold, math.inf, lo_closed=not strict)
        return Interval(-math.inf, threshold, hi_closed=not strict)

    def _default_label(self) -> str:
        terms = ' + '.join(f"{a:g}*x[{i}]" for i, a in zip(self._indices.tolist(), self._coefficients.tolist()))
        return f"{terms or '0'} + {self._constant:g} {self._relation.value} 0"

    def __repr__(self):
        return f"AffinePredicate({self._label})"

    def __str__(self):
        return self._label


class NamedPredicate(IPredicate):
    """
    Predicate g(x) ~ 0 where g is a registered nonlinear function.

    Args:
        name (str): Registry key.
        support (tuple[int, ...]): Coordinates g reads.
        relation (Relation): >= or >.
        params (dict): Keyword parameters passed to g.
        label (str, optional): Human-readable form.
    """

    def __init__(self, name: str, support: tuple[int, ...], relation: Relation, params: Optional[dict] = None, label: Optional[str] = None):
        if name not in _PREDICATE_FUNCTIONS:
            raise KeyError(f"unknown predicate function '{name}'")
        self._name = name
        self._support = tuple(int(i) for i in support)
        self._relation = relation
        self._params = dict(params or {})
        self._function = _PREDICATE_FUNCTIONS[name]
        self._label = label or f"{name}{self._support} {relation.value} 0"

    def name(self) -> str:
        return self._name

    def params(self) -> dict:
        return dict(self._params)

    def relation(self) -> Relation:
        return self._relation

    def value(self, x: np.ndarray) -> float:
        return float(self._function(x, **self._params))

    def holds(self, x: np.ndarray) -> bool:
        return self._relation.holds(self.value(x))

    def support(self) -> tuple[int, ...]:
        return self._support

    def satisfiable_on(self, box: Mapping[int, Interval]) -> Optional[bool]:
        """
        Decide whether some point of the box satisfies the predicate.

        Coordinates missing from `box` are unconstrained. Returns None when no box check
        is registered for this function or the check cannot decide.
        """
        check = _BOX_CHECKS.get(self._name)
        if check is None:
            return None
        return check(box, self._relation, **self._params)

    def __repr__(self):
        return f"NamedPredicate({self._label})"

    def __str__(self):
        return self._label


def _max_abs_deviation(x, coordinates, references=None):
    values = x[list(coordinates)]
    if references is not None:
        values = values - x[list(references)]
    return float(np.max(np.abs(values)))


def _deviation_range(box, coordinates):
    """Infimum and supremum of max_i |x_i| over the box, each with an attainment flag."""
    infs, sups = [], []
    for i in coordinates:
        interval = box.get(i, Interval.full())
        infs.append(interval.abs_inf())
        sups.append(interval.abs_sup())
    inf_value = max(v for v, _ in infs)
    inf_attained = all(attained for v, attained in infs if v == inf_value)
    sup_value = max(v for v, _ in sups)
    sup_attained = any(attained for v, attained in sups if v == sup_value)
    return inf_value, inf_attained, sup_value, sup_attained


def _margin_box_check(box, relation, coordinates, epsilon, references=None):
    if references is not None:
        return None
    inf_value, inf_attained, _, _ = _deviation_range(box, coordinates)
    if relation is Relation.GE:
        return inf_value < epsilon or (inf_value == epsilon and inf_attained)
    return inf_value < epsilon


def _excess_box_check(box, relation, coordinates, epsilon, references=None):
    if references is not None:
        return None
    _, _, sup_value, sup_attained = _deviation_range(box, coordinates)
    if relation is Relation.GT:
        return sup_value > epsilon
    return sup_value > epsilon or (sup_value == epsilon and sup_attained)


@register_predicate_function('deviation_margin', _margin_box_check)
def deviation_margin(x, coordinates, epsilon, references=None):
    """epsilon - max_i |x[c_i] - x[r_i]| (reference 0 when `references` is None)"""
    return epsilon - _max_abs_deviation(x, coordinates, references)


@register_predicate_function('deviation_excess', _excess_box_check)
def deviation_excess(x, coordinates, epsilon, references=None):
    """max_i |x[c_i] - x[r_i]| - epsilon"""
    return _max_abs_deviation(x, coordinates, references) - epsilon


def within_epsilon(coordinates, epsilon: float, references=None) -> NamedPredicate:
    """|x - ref| <= epsilon in the infinity norm over the given coordinates."""
    coordinates = tuple(coordinates)
    references = tuple(references) if references is not None else None
    support = coordinates + (references or ())
    return NamedPredicate('deviation_margin', support, Relation.GE,
                          {'coordinates': coordinates, 'epsilon': epsilon, 'references': references},
                          label=f"|x{list(coordinates)}{' - x' + str(list(references)) if references else ''}| <= {epsilon:g}")


def beyond_epsilon(coordinates, epsilon: float, references=None) -> NamedPredicate:
    """|x - ref| > epsilon in the infinity norm over the given coordinates."""
    coordinates = tuple(coordinates)
    references = tuple(references) if references is not None else None
    support = coordinates + (references or ())
    return NamedPredicate('deviation_excess', support, Relation.GT,
                          {'coordinates': coordinates, 'epsilon': epsilon, 'references': references},
                          label=f"|x{list(coordinates)}{' - x' + str(list(references)) if references else ''}| > {epsilon:g}")


@dataclass(frozen=True)
class Guard:
    """Conjunction of predicates; the empty conjunction is true."""
    predicates: tuple[IPredicate, ...] = field(default_factory=tuple)

    @staticmethod
    def always() -> Guard:
        return Guard(())

    def holds(self, x: np.ndarray) -> bool:
        return all(predicate.holds(x) for predicate in self.predicates)

    def support(self) -> tuple[int, ...]:
        indices = set()
        for predicate in self.predicates:
            indices.update(predicate.support())
        return tuple(sorted(indices))

    def __str__(self):
        if not self.predicates:
            return 'true'
        return ' and '.join(str(p) for p in self.predicates)


# Clock guards. Equalities c = theta are sampled: they hold on the crossing window
# theta <= c < theta + h, so the jump happens at the first sample with c >= theta.
# Both ends are shifted down by CLOCK_TOLERANCE so a clock summed from steps of h that
# lands an ulp short of theta still hits the window exactly once.
CLOCK_TOLERANCE = 1e-9


def clock_crossing(clock: int, threshold: float, h: float) -> tuple[AffinePredicate, ...]:
    """c = threshold for a constant threshold."""
    return (AffinePredicate({clock: 1.0}, -threshold + CLOCK_TOLERANCE, Relation.GE, f"c >= {threshold:g}"),
            AffinePredicate({clock: -1.0}, threshold + h - CLOCK_TOLERANCE, Relation.GT, f"c < {threshold:g} + h"))


def clock_matches(clock: int, variable: int, h: float) -> tuple[AffinePredicate, ...]:
    """c = x[variable], e.g. the period check c = p."""
    return (AffinePredicate({clock: 1.0, variable: -1.0}, CLOCK_TOLERANCE, Relation.GE, "c - p >= 0"),
            AffinePredicate({clock: -1.0, variable: 1.0}, h - CLOCK_TOLERANCE, Relation.GT, "p + h - c > 0"))


def clock_within(clock: int, bound: float) -> tuple[AffinePredicate, ...]:
    """0 < c <= bound"""
    return (AffinePredicate.above(clock, 0.0, "c > 0"),
            AffinePredicate.at_most(clock, bound + CLOCK_TOLERANCE, f"c <= {bound:g}"))


def clock_after(clock: int, bound: float) -> tuple[AffinePredicate, ...]:
    """c > bound"""
    return (AffinePredicate.above(clock, bound + CLOCK_TOLERANCE, f"c > {bound:g}"),)
