from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.models.plant import PlantDefinition


class MemoryForm(Enum):
    STORED_POINT = 'xp'
    DIFFERENCE = 'z'


@dataclass(frozen=True)
class OscillationLayout:
    """
    Index bookkeeping of the oscillation automaton state [x (n), k (m), c, p, mem (n)].

    `mem` holds the stored point x_p, or z = x - x_p in the difference form.
    """
    plant_dim: int
    param_dim: int
    form: MemoryForm = MemoryForm.DIFFERENCE

    @staticmethod
    def from_spec(spec, form: MemoryForm = MemoryForm.DIFFERENCE) -> OscillationLayout:
        return OscillationLayout(spec.plant_dim, spec.param_dim, form)

    @property
    def clock(self) -> int:
        return self.plant_dim + self.param_dim

    @property
    def period(self) -> int:
        return self.plant_dim + self.param_dim + 1

    @property
    def dimension(self) -> int:
        return 2 * self.plant_dim + self.param_dim + 2

    def plant(self) -> range:
        return range(self.plant_dim)

    def parameters(self) -> range:
        return range(self.plant_dim, self.plant_dim + self.param_dim)

    def memory(self) -> range:
        start = self.plant_dim + self.param_dim + 2
        return range(start, start + self.plant_dim)

    def memory_of(self, coordinates) -> tuple[int, ...]:
        start = self.memory().start
        return tuple(start + i for i in coordinates)

    def deviation(self, x: np.ndarray, coordinates) -> np.ndarray:
        """x - x_p on the given plant coordinates, whatever the memory form."""
        memory = x[list(self.memory_of(coordinates))]
        if self.form is MemoryForm.DIFFERENCE:
            return memory.copy()
        return x[list(coordinates)] - memory

    def variable_names(self, plant: PlantDefinition) -> tuple[str, ...]:
        if self.form is MemoryForm.DIFFERENCE:
            memory = tuple(f"z_{name}" for name in plant.variable_names)
        else:
            memory = tuple(f"{name}_p" for name in plant.variable_names)
        return plant.variable_names + plant.varied_names() + ('c', 'p') + memory

    def bounding_box(self, plant: PlantDefinition, t_init: float) -> tuple[np.ndarray, np.ndarray]:
        """Box used to sample goal points; clocks range over [0, 2 T_i]."""
        lower, upper = plant.bounds()
        if self.param_dim:
            k_lower, k_upper = plant.parameter_bounds()
        else:
            k_lower, k_upper = np.zeros(0), np.zeros(0)
        clocks_lower, clocks_upper = np.zeros(2), np.full(2, 2.0 * t_init)
        if self.form is MemoryForm.DIFFERENCE:
            mem_lower, mem_upper = lower - upper, upper - lower
        else:
            mem_lower, mem_upper = lower, upper
        return (np.concatenate([lower, k_lower, clocks_lower, mem_lower]),
                np.concatenate([upper, k_upper, clocks_upper, mem_upper]))


@dataclass(frozen=True)
class OvershootLayout:
    """Index bookkeeping of the overshoot automaton state [x (n), k (m), x*, c, omega]."""
    plant_dim: int
    param_dim: int

    @property
    def reference(self) -> int:
        return self.plant_dim + self.param_dim

    @property
    def clock(self) -> int:
        return self.plant_dim + self.param_dim + 1

    @property
    def peak(self) -> int:
        return self.plant_dim + self.param_dim + 2

    @property
    def dimension(self) -> int:
        return self.plant_dim + self.param_dim + 3
