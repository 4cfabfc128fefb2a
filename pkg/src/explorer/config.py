from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum
from typing import Optional


class ExplorerConfigError(ValueError):
    pass


class InputMode(Enum):
    UNIFORM = 'uniform'
    GRID = 'grid'


class TransitionTiming(Enum):
    DEADLINE = 'deadline'
    STEER = 'steer'


class GoalBias(Enum):
    ABSTRACTION = 'abstraction'
    BOX = 'box'


@dataclass(frozen=True)
class ExplorerConfig:
    """
    Settings of one guided exploration.

    Attributes:
        n_iterations (int): Goal / neighbor / extend rounds.
        h (float): Step of every continuous extension.
        input_mode (InputMode): Uniform draws or a grid over the input box.
        n_inputs (int): Uniform candidates per extension.
        grid_resolution (int): Points per input axis in grid mode.
        distance_coordinates (tuple[int, ...], optional): State coordinates of the metric;
            None means the monitored plant coordinates and their stored-point coordinates.
        distance_weights (tuple[float, ...], optional): Weights of those coordinates, default 1.
        location_penalty (float, optional): Added when locations differ; None means the
            diameter of the bounding box over the distance coordinates.
        seed (int): Seed of the run's random stream.
        walk_steps (int): Walk steps per goal sample.
        transition_timing (TransitionTiming): Optional transitions only at their deadline, or as steering candidates too.
        goal_bias (GoalBias): Goals from the abstraction walk or uniformly from the box.
        stop_on_falsification (bool): End the run at the first falsifying jump.
    """
    n_iterations: int = 30000
    h: float = 0.05
    input_mode: InputMode = InputMode.UNIFORM
    n_inputs: int = 5
    grid_resolution: int = 3
    distance_coordinates: Optional[tuple[int, ...]] = None
    distance_weights: Optional[tuple[float, ...]] = None
    location_penalty: Optional[float] = None
    seed: int = 0
    walk_steps: int = 1
    transition_timing: TransitionTiming = TransitionTiming.DEADLINE
    goal_bias: GoalBias = GoalBias.ABSTRACTION
    stop_on_falsification: bool = True

    def __post_init__(self):
        if self.n_iterations < 1:
            raise ExplorerConfigError(f"n_iterations must be >= 1, got {self.n_iterations}")
        if self.h <= 0.0:
            raise ExplorerConfigError(f"h must be positive, got {self.h}")
        if self.n_inputs < 1 or self.grid_resolution < 1 or self.walk_steps < 1:
            raise ExplorerConfigError("n_inputs, grid_resolution and walk_steps must be >= 1")
        if self.location_penalty is not None and self.location_penalty < 0.0:
            raise ExplorerConfigError(f"location_penalty must be >= 0, got {self.location_penalty}")
        if self.distance_weights is not None:
            if self.distance_coordinates is None or len(self.distance_weights) != len(self.distance_coordinates):
                raise ExplorerConfigError("distance_weights needs distance_coordinates of the same length")
            if any(w < 0.0 for w in self.distance_weights):
                raise ExplorerConfigError(f"negative distance weight in {self.distance_weights}")

    def with_seed(self, seed: int) -> ExplorerConfig:
        return dataclasses.replace(self, seed=seed)

    def to_dict(self) -> dict:
        return {
            'n_iterations': self.n_iterations,
            'h': self.h,
            'input_mode': self.input_mode.value,
            'n_inputs': self.n_inputs,
            'grid_resolution': self.grid_resolution,
            'distance_coordinates': list(self.distance_coordinates) if self.distance_coordinates is not None else None,
            'distance_weights': list(self.distance_weights) if self.distance_weights is not None else None,
            'location_penalty': self.location_penalty,
            'seed': self.seed,
            'walk_steps': self.walk_steps,
            'transition_timing': self.transition_timing.value,
            'goal_bias': self.goal_bias.value,
            'stop_on_falsification': self.stop_on_falsification,
        }

    @staticmethod
    def from_dict(data: dict) -> ExplorerConfig:
        defaults = ExplorerConfig()
        coordinates = data.get('distance_coordinates')
        weights = data.get('distance_weights')
        return ExplorerConfig(
            n_iterations=int(data.get('n_iterations', defaults.n_iterations)),
            h=float(data.get('h', defaults.h)),
            input_mode=InputMode(data.get('input_mode', defaults.input_mode.value)),
            n_inputs=int(data.get('n_inputs', defaults.n_inputs)),
            grid_resolution=int(data.get('grid_resolution', defaults.grid_resolution)),
            distance_coordinates=tuple(int(i) for i in coordinates) if coordinates is not None else None,
            distance_weights=tuple(float(w) for w in weights) if weights is not None else None,
            location_penalty=float(data['location_penalty']) if data.get('location_penalty') is not None else None,
            seed=int(data.get('seed', defaults.seed)),
            walk_steps=int(data.get('walk_steps', defaults.walk_steps)),
            transition_timing=TransitionTiming(data.get('transition_timing', defaults.transition_timing.value)),
            goal_bias=GoalBias(data.get('goal_bias', defaults.goal_bias.value)),
            stop_on_falsification=bool(data.get('stop_on_falsification', defaults.stop_on_falsification)),
        )
