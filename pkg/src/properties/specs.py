from dataclasses import dataclass
from typing import Callable

import numpy as np


class PropertySpecError(Exception):
    pass


@dataclass(frozen=True)
class OscillationSpec:
    """
    Parameters of the oscillation / steady-state property.

    Attributes:
        t_init (float): Maximal transient duration T_i spent in INIT before learning starts.
        delta (float): Smallest period the monitor resolves; returns within (0, delta] mean steady state.
        epsilon (float): Return tolerance of the infinity-norm check on the monitored coordinates.
        monitored (tuple[int, ...]): Plant coordinates compared against the stored point.
        plant_dim (int): n.
        param_dim (int): m, the number of varied parameters.
        h (float): Sampling / integration step; clock equalities are checked on this grid.
        min_cycles (int): Completed self-checks needed for an Oscillating or Steady verdict.
    """
    t_init: float
    delta: float
    epsilon: float
    monitored: tuple[int, ...]
    plant_dim: int
    param_dim: int = 0
    h: float = 0.05
    min_cycles: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'monitored', tuple(int(i) for i in self.monitored))
        if self.t_init <= 0.0 or self.delta <= 0.0 or self.epsilon <= 0.0 or self.h <= 0.0:
            raise PropertySpecError(f"t_init, delta, epsilon and h must be positive: "
                                    f"{self.t_init}, {self.delta}, {self.epsilon}, {self.h}")
        if self.delta < self.h * (1.0 - 1e-9):
            raise PropertySpecError(f"delta={self.delta} is smaller than the step h={self.h}")
        if not self.monitored:
            raise PropertySpecError("no monitored coordinate")
        if self.plant_dim < 1 or self.param_dim < 0:
            raise PropertySpecError(f"invalid dimensions n={self.plant_dim}, m={self.param_dim}")
        if any(i < 0 or i >= self.plant_dim for i in self.monitored):
            raise PropertySpecError(f"monitored {self.monitored} outside the plant dimension {self.plant_dim}")
        if len(set(self.monitored)) != len(self.monitored):
            raise PropertySpecError(f"monitored coordinates repeat: {self.monitored}")
        if self.min_cycles < 1:
            raise PropertySpecError(f"min_cycles must be >= 1, got {self.min_cycles}")


@dataclass(frozen=True, eq=False)
class OvershootSpec:
    """
    Peak deviation of one plant output above a reference response x*' = f*(x*).

    Attributes:
        reference_dynamics (Callable): f*, mapping a 1-vector to a 1-vector.
        delta (float): Sampling period of the peak update.
        plant_dim (int): n.
        param_dim (int): m.
        monitored (int): Plant coordinate compared with x*.
        reference_initial (tuple[float, ...]): x*(0).
        h (float): Integration step.
    """
    reference_dynamics: Callable[[np.ndarray], np.ndarray]
    delta: float
    plant_dim: int
    param_dim: int = 0
    monitored: int = 0
    reference_initial: tuple[float, ...] = (0.0,)
    h: float = 0.05

    def __post_init__(self):
        if self.delta <= 0.0 or self.h <= 0.0:
            raise PropertySpecError(f"delta and h must be positive: {self.delta}, {self.h}")
        if self.delta < self.h * (1.0 - 1e-9):
            raise PropertySpecError(f"delta={self.delta} is smaller than the step h={self.h}")
        if not 0 <= self.monitored < self.plant_dim:
            raise PropertySpecError(f"monitored {self.monitored} outside the plant dimension {self.plant_dim}")
        if len(self.reference_initial) != 1:
            raise PropertySpecError(f"the reference tracks one output, got x*(0)={self.reference_initial}")
        derivative = np.asarray(self.reference_dynamics(np.array(self.reference_initial, dtype=float)), dtype=float)
        if derivative.shape != (1,):
            raise PropertySpecError(f"reference dynamics returned shape {derivative.shape}, expected (1,)")


def constant_reference(x_ref: np.ndarray) -> np.ndarray:
    """f* = 0: a constant set point."""
    return np.zeros(1)
