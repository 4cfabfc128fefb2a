from dataclasses import dataclass

import numpy as np

from src.models.plant import PlantDefinition, PlantError

PER_MINUTE = 'min^-1'
PER_MINUTE_MICROMOLAR = 'min^-1 uM^-1'

# Unit of each rate constant k1..k14
PARAMETER_UNITS = (
    PER_MINUTE, PER_MINUTE, PER_MINUTE, PER_MINUTE, PER_MINUTE,
    PER_MINUTE_MICROMOLAR, PER_MINUTE_MICROMOLAR, PER_MINUTE, PER_MINUTE,
    PER_MINUTE_MICROMOLAR, PER_MINUTE, PER_MINUTE, PER_MINUTE, PER_MINUTE_MICROMOLAR,
)

VARIABLE_NAMES = ('ACA', 'PKA', 'ERK2', 'REGA', 'cAMP_i', 'cAMP_e', 'CAR1')


@dataclass(frozen=True)
class LaubLoomisParams:
    """Rate constants k1..k14 of the cAMP oscillator (spontaneous-oscillation regime by default)."""
    k: tuple[float, ...] = (2.0, 0.9, 2.5, 1.5, 0.6, 0.8, 1.0, 1.3, 0.3, 0.8, 0.7, 4.9, 23.0, 4.5)

    def __post_init__(self):
        if len(self.k) != 14:
            raise PlantError(f"Laub-Loomis needs 14 rate constants, got {len(self.k)}")
        if any(value <= 0.0 for value in self.k):
            raise PlantError(f"Laub-Loomis rate constants must be positive: {self.k}")

    def as_array(self) -> np.ndarray:
        return np.array(self.k, dtype=float)

    def unit(self, index: int) -> str:
        return PARAMETER_UNITS[index]


def nominal_parameters() -> LaubLoomisParams:
    return LaubLoomisParams()


def laub_loomis_dynamics(x: np.ndarray, k: np.ndarray) -> np.ndarray:
    """
    Right-hand side of the seven-variable cAMP network.

    Args:
        x (np.ndarray): Concentrations (ACA, PKA, ERK2, REGA, internal cAMP, external cAMP, CAR1).
        k (np.ndarray): Rate constants k1..k14.

    Returns:
        np.ndarray: dx/dt.
    """
    if len(x) != 7 or len(k) != 14:
        raise PlantError(f"Laub-Loomis expects 7 variables and 14 parameters, got {len(x)} and {len(k)}")
    x1, x2, x3, x4, x5, x6, x7 = x
    return np.array([
        k[0] * x7 - k[1] * x1 * x2,
        k[2] * x5 - k[3] * x2,
        k[4] * x7 - k[5] * x2 * x3,
        k[6] - k[7] * x3 * x4,
        k[8] * x1 - k[9] * x4 * x5,
        k[10] * x1 - k[11] * x6,
        k[12] * x6 - k[13] * x7,
    ])


def laub_loomis_plant(params: LaubLoomisParams = None) -> PlantDefinition:
    params = params or nominal_parameters()
    return PlantDefinition(
        name='laub_loomis',
        dimension=7,
        dynamics=laub_loomis_dynamics,
        parameters=params.k,
        default_state=(1.0,) * 7,
        lower_bounds=(0.0,) * 7,
        upper_bounds=(5.0,) * 7,
        variable_names=VARIABLE_NAMES,
        parameter_names=tuple(f"k{i + 1}" for i in range(14)),
        parameter_units=PARAMETER_UNITS,
        description='Revisited Laub-Loomis cAMP network; the default state is replaced by a calibrated one at experiment build time.',
    )
