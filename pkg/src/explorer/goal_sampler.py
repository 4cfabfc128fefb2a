import logging
from collections import Counter
from typing import Optional, Sequence

import numpy as np

from src.abstraction.metropolis import TransitionMatrix, walk_step
from src.abstraction.transition_system import AbstractState, AbstractTransitionSystem
from src.hybrid.state import HybridState
from src.interfaces.IGoalSampler import IGoalSampler


class AbstractionGoalSampler(IGoalSampler):
    """
    Goals from a Metropolis-Hastings walk on the abstraction.

    Each call advances the walk `walk_steps` steps; the goal location is the walk state's location
    and the goal point is uniform in its cell clipped to the bounding box. An empty clipped cell
    falls back to the whole box and is counted.

    Args:
        system (AbstractTransitionSystem): The abstraction the walk runs on.
        matrix (TransitionMatrix): Walk probabilities over `system`'s states.
        lower (np.ndarray): Bounding box lower corner, full state dimension.
        upper (np.ndarray): Bounding box upper corner.
        walk_steps (int): Walk steps per goal.
        record (bool): Keep a goal log.
        logger (logging.Logger, optional): Logger instance.
    """

    def __init__(self, system: AbstractTransitionSystem, matrix: TransitionMatrix, lower: np.ndarray, upper: np.ndarray,
                 walk_steps: int = 1, record: bool = False, logger: Optional[logging.Logger] = None):
        self._system = system
        self._matrix = matrix
        self._lower = np.asarray(lower, dtype=float)
        self._upper = np.asarray(upper, dtype=float)
        self._walk_steps = walk_steps
        self._record = record
        self._logger = logger or logging.getLogger(__name__)
        self._current = system.initial()
        self._counts: Counter = Counter()
        self._empty_cells = 0
        self._log: list[tuple[int, str, np.ndarray]] = []
        self._iteration = 0

    def current(self) -> AbstractState:
        return self._current

    def pin(self, state: AbstractState):
        """Move the walk to `state`."""
        self._current = state

    def sample_goal(self, rng: np.random.Generator) -> HybridState:
        for _ in range(self._walk_steps):
            self._current = walk_step(self._matrix, self._current, rng)
        state = self._current
        cell = self._system.predicate_map().gamma(state.location, state.valuation)
        x = cell.sample(rng, self._lower, self._upper)
        if x is None:
            self._empty_cells += 1
            self._logger.warning(f"Goal cell {state} does not meet the bounding box, sampling the whole box")
            x = rng.uniform(self._lower, self._upper)
        self._counts[state.label] += 1
        if self._record:
            self._log.append((self._iteration, state.label, x))
        self._iteration += 1
        return HybridState(state.location, x)

    def goal_counts(self) -> dict[str, int]:
        return dict(self._counts)

    def empty_cell_warnings(self) -> int:
        return self._empty_cells

    def goal_log(self) -> list[tuple[int, str, np.ndarray]]:
        return list(self._log)


class BoxGoalSampler(IGoalSampler):
    """Goals with a uniformly drawn location and a uniform point of the bounding box."""

    def __init__(self, locations: Sequence[str], lower: np.ndarray, upper: np.ndarray, record: bool = False):
        self._locations = tuple(locations)
        self._lower = np.asarray(lower, dtype=float)
        self._upper = np.asarray(upper, dtype=float)
        self._record = record
        self._counts: Counter = Counter()
        self._log: list[tuple[int, str, np.ndarray]] = []
        self._iteration = 0

    def sample_goal(self, rng: np.random.Generator) -> HybridState:
        location = self._locations[int(rng.integers(len(self._locations)))]
        x = rng.uniform(self._lower, self._upper)
        self._counts[location] += 1
        if self._record:
            self._log.append((self._iteration, location, x))
        self._iteration += 1
        return HybridState(location, x)

    def goal_counts(self) -> dict[str, int]:
        return dict(self._counts)

    def goal_log(self) -> list[tuple[int, str, np.ndarray]]:
        return list(self._log)
