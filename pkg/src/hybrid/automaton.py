from __future__ import annotations

import itertools
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from src.hybrid.errors import AutomatonDefinitionError
from src.hybrid.predicates import Guard
from src.hybrid.state import HybridState

# Points drawn per transition when checking that guards stay inside source invariants.
GUARD_CHECK_SAMPLES = 2000
from src.interfaces.IPredicate import IPredicate
from src.utils.interval import Interval

VectorField = Callable[[np.ndarray, np.ndarray], np.ndarray]


# Deterministic right-hand sides of reset assignments
class ResetExpression(ABC):
    @abstractmethod
    def evaluate(self, x: np.ndarray) -> float:
        pass

    def image(self, box: Mapping[int, Interval]) -> Optional[Interval]:
        """Interval image of the expression over a box, or None when not representable."""
        return None


@dataclass(frozen=True)
class ConstantExpr(ResetExpression):
    value: float

    def evaluate(self, x):
        return self.value

    def image(self, box):
        return Interval.point(self.value)

    def __str__(self):
        return f"{self.value:g}"


@dataclass(frozen=True)
class CoordinateExpr(ResetExpression):
    index: int

    def evaluate(self, x):
        return float(x[self.index])

    def image(self, box):
        return box.get(self.index, Interval.full())

    def __str__(self):
        return f"x[{self.index}]"


@dataclass(frozen=True)
class AffineExpr(ResetExpression):
    coefficients: tuple[tuple[int, float], ...]
    constant: float = 0.0

    def evaluate(self, x):
        return sum(a * float(x[i]) for i, a in self.coefficients) + self.constant

    def __str__(self):
        terms = ' + '.join(f"{a:g}*x[{i}]" for i, a in self.coefficients)
        return f"{terms} + {self.constant:g}"


@dataclass(frozen=True)
class MaxExpr(ResetExpression):
    terms: tuple[ResetExpression, ...]

    def evaluate(self, x):
        return max(term.evaluate(x) for term in self.terms)

    def __str__(self):
        return f"max({', '.join(str(t) for t in self.terms)})"


class ResetMap:
    """
    Simultaneous deterministic assignments x_i := e_i(x).

    All right-hand sides read the pre-jump state; unassigned coordinates pass through.

    Args:
        assignments (Sequence[tuple[int, ResetExpression]]): (variable index, expression) pairs.

    Raises:
        AutomatonDefinitionError: on duplicate targets or non-deterministic (set-valued) right-hand sides.
    """

    def __init__(self, assignments: Sequence[tuple[int, ResetExpression]] = ()):
        targets = [int(i) for i, _ in assignments]
        if len(set(targets)) != len(targets):
            raise AutomatonDefinitionError(f"reset assigns a variable twice: {targets}")
        for index, expression in assignments:
            if not isinstance(expression, ResetExpression):
                raise AutomatonDefinitionError(
                    f"reset of x[{index}] is not a deterministic expression: {expression!r}")
        self._assignments = tuple((int(i), e) for i, e in assignments)

    @staticmethod
    def identity() -> ResetMap:
        return ResetMap(())

    def assignments(self) -> tuple[tuple[int, ResetExpression], ...]:
        return self._assignments

    def assigned_indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self._assignments)

    def expression_for(self, index: int) -> Optional[ResetExpression]:
        for i, expression in self._assignments:
            if i == index:
                return expression
        return None

    def apply(self, x: np.ndarray) -> np.ndarray:
        values = [(i, expression.evaluate(x)) for i, expression in self._assignments]
        result = x.copy()
        for i, value in values:
            result[i] = value
        return result

    def __str__(self):
        if not self._assignments:
            return 'id'
        return ', '.join(f"x[{i}] := {e}" for i, e in self._assignments)


@dataclass(frozen=True)
class InputBox:
    """Axis-aligned input set U_q; dimension 0 means the location is autonomous."""
    lower: tuple[float, ...] = ()
    upper: tuple[float, ...] = ()

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise AutomatonDefinitionError("input box bounds differ in dimension")
        if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise AutomatonDefinitionError(f"input box has lower > upper: {self.lower} {self.upper}")

    def dimension(self) -> int:
        return len(self.lower)

    def zero(self) -> np.ndarray:
        return np.zeros(self.dimension())

    def contains(self, u: np.ndarray) -> bool:
        if len(u) != self.dimension():
            return False
        return bool(np.all(u >= np.array(self.lower)) and np.all(u <= np.array(self.upper)))

    def sample_uniform(self, rng: np.random.Generator, count: int) -> np.ndarray:
        if self.dimension() == 0:
            return np.zeros((1, 0))
        return rng.uniform(np.array(self.lower), np.array(self.upper), size=(count, self.dimension()))

    def grid(self, resolution: int) -> np.ndarray:
        if self.dimension() == 0:
            return np.zeros((1, 0))
        axes = [np.linspace(lo, hi, resolution) if resolution > 1 else np.array([(lo + hi) / 2.0])
                for lo, hi in zip(self.lower, self.upper)]
        return np.array(list(itertools.product(*axes)), dtype=float)


@dataclass(frozen=True)
class InputSaturation:
    """
    Clamps an input component to 0 when one step would push its driven coordinate out of [lower, upper].

    `coordinates[i]` is the state coordinate whose derivative is input component i.
    """
    coordinates: tuple[int, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def clamp(self, x: np.ndarray, u: np.ndarray, h: float) -> np.ndarray:
        clamped = np.array(u, dtype=float, copy=True)
        for i, index in enumerate(self.coordinates):
            predicted = x[index] + h * clamped[i]
            if predicted > self.upper[i] or predicted < self.lower[i]:
                clamped[i] = 0.0
        return clamped


@dataclass(frozen=True, eq=False)
class Location:
    name: str
    dynamics: VectorField
    invariant: tuple[IPredicate, ...] = ()
    input_box: InputBox = field(default_factory=InputBox)
    saturation: Optional[InputSaturation] = None

    def invariant_holds(self, x: np.ndarray) -> bool:
        return all(predicate.holds(x) for predicate in self.invariant)

    def saturate(self, x: np.ndarray, u: np.ndarray, h: float) -> np.ndarray:
        if self.saturation is None:
            return np.asarray(u, dtype=float)
        return self.saturation.clamp(x, u, h)


@dataclass(frozen=True, eq=False)
class Transition:
    """
    A guarded jump. Without a deadline the transition is urgent: it must fire as soon as the
    guard holds. With a deadline it is optional while the guard holds and forced once the
    deadline holds as well.
    """
    id: int
    name: str
    source: str
    target: str
    guard: Guard
    reset: ResetMap = field(default_factory=ResetMap.identity)
    deadline: Optional[Guard] = None

    def is_urgent(self) -> bool:
        return self.deadline is None

    def is_forced(self, x: np.ndarray) -> bool:
        return self.deadline is None or self.deadline.holds(x)


class HybridAutomaton:
    """
    A hybrid automaton: locations with dynamics, invariants and input sets, guarded transitions
    with deterministic resets, and an initial (location, continuous state) pair.

    Args:
        name (str): Name used in logs.
        locations (Sequence[Location]): Locations in declaration order.
        transitions (Sequence[Transition]): Transitions; `id` must equal the position.
        initial_location (str): q0.
        initial_state (np.ndarray): x0.
        variable_names (Sequence[str], optional): Names of the continuous coordinates.
        logger (logging.Logger, optional): Logger instance.
        guard_check_box (tuple[np.ndarray, np.ndarray], optional): Box to sample guard points from;
            when given, every sampled guard point must satisfy the source invariant.

    Raises:
        AutomatonDefinitionError: on dangling transitions, bad ids, an initial state outside the invariant,
            or a sampled guard point outside the source invariant.
    """

    def __init__(self, name: str, locations: Sequence[Location], transitions: Sequence[Transition],
                 initial_location: str, initial_state: np.ndarray, variable_names: Optional[Sequence[str]] = None,
                 logger: Optional[logging.Logger] = None,
                 guard_check_box: Optional[tuple[np.ndarray, np.ndarray]] = None):
        self._logger = logger or logging.getLogger(__name__)
        self._name = name
        self._locations = tuple(locations)
        self._by_name = {location.name: location for location in self._locations}
        if len(self._by_name) != len(self._locations):
            raise AutomatonDefinitionError(f"{name}: duplicate location names")
        self._transitions = tuple(transitions)
        for position, transition in enumerate(self._transitions):
            if transition.id != position:
                raise AutomatonDefinitionError(f"{name}: transition '{transition.name}' has id {transition.id}, expected {position}")
            if transition.source not in self._by_name or transition.target not in self._by_name:
                raise AutomatonDefinitionError(f"{name}: transition '{transition.name}' references an unknown location")
        if initial_location not in self._by_name:
            raise AutomatonDefinitionError(f"{name}: unknown initial location '{initial_location}'")
        self._initial_location = initial_location
        self._initial_state = np.array(initial_state, dtype=float)
        self._initial_state.setflags(write=False)
        if not self._by_name[initial_location].invariant_holds(self._initial_state):
            raise AutomatonDefinitionError(f"{name}: initial state violates the invariant of '{initial_location}'")
        dimension = len(self._initial_state)
        self._variable_names = tuple(variable_names) if variable_names is not None else tuple(f"x{i + 1}" for i in range(dimension))
        if len(self._variable_names) != dimension:
            raise AutomatonDefinitionError(f"{name}: {len(self._variable_names)} variable names for dimension {dimension}")
        self._outgoing = {location.name: tuple(t for t in self._transitions if t.source == location.name)
                          for location in self._locations}
        if guard_check_box is not None:
            self.check_guards_within_invariants(*guard_check_box)
        self._logger.debug(f"Built automaton {name}: {len(self._locations)} locations, "
                           f"{len(self._transitions)} transitions, dimension {dimension}")

    def name(self) -> str:
        return self._name

    def dimension(self) -> int:
        return len(self._initial_state)

    def locations(self) -> tuple[Location, ...]:
        return self._locations

    def location_names(self) -> tuple[str, ...]:
        return tuple(location.name for location in self._locations)

    def location(self, name: str) -> Location:
        return self._by_name[name]

    def transitions(self) -> tuple[Transition, ...]:
        return self._transitions

    def transition(self, transition_id: int) -> Transition:
        return self._transitions[transition_id]

    def outgoing(self, location: str) -> tuple[Transition, ...]:
        return self._outgoing[location]

    def initial_location(self) -> str:
        return self._initial_location

    def initial_state(self) -> np.ndarray:
        return self._initial_state

    def initial_hybrid_state(self) -> HybridState:
        return HybridState(self._initial_location, self._initial_state.copy(), 0, 0.0)

    def variable_names(self) -> tuple[str, ...]:
        return self._variable_names

    def index_of(self, variable: str) -> int:
        return self._variable_names.index(variable)

    def check_guards_within_invariants(self, lower: np.ndarray, upper: np.ndarray,
                                       n_samples: int = GUARD_CHECK_SAMPLES, seed: int = 0):
        """
        Sample the box uniformly and require every point that satisfies a guard to satisfy
        the invariant of the transition's source location.

        Raises:
            AutomatonDefinitionError: on a box of the wrong dimension or a guard point outside the invariant.
        """
        lower, upper = np.asarray(lower, dtype=float), np.asarray(upper, dtype=float)
        if lower.shape != (self.dimension(),) or upper.shape != (self.dimension(),):
            raise AutomatonDefinitionError(f"{self._name}: guard check box does not match dimension {self.dimension()}")
        rng = np.random.default_rng(seed)
        points = rng.uniform(lower, upper, size=(n_samples, self.dimension()))
        for transition in self._transitions:
            source = self._by_name[transition.source]
            if not source.invariant:
                continue
            for x in points:
                if transition.guard.holds(x) and not source.invariant_holds(x):
                    raise AutomatonDefinitionError(
                        f"{self._name}: guard of '{transition.name}' holds at {np.array2string(x, precision=4)} "
                        f"outside the invariant of '{source.name}'")

    def __repr__(self):
        return f"HybridAutomaton({self._name})"
