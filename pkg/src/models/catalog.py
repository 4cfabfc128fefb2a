from typing import Callable

from src.models.laub_loomis import laub_loomis_plant
from src.models.plant import PlantDefinition, PlantError
from src.models.synthetic import contracting_plant, harmonic_plant, hopf_plant

PLANT_FACTORIES: dict[str, Callable[[], PlantDefinition]] = {
    'laub_loomis': laub_loomis_plant,
    'harmonic': harmonic_plant,
    'contract': contracting_plant,
    'hopf': hopf_plant,
}


def get_plant(name: str) -> PlantDefinition:
    if name not in PLANT_FACTORIES:
        raise PlantError(f"unknown plant '{name}', expected one of {sorted(PLANT_FACTORIES)}")
    return PLANT_FACTORIES[name]()


def synthetic_plants() -> dict[str, PlantDefinition]:
    """Oracle plants with closed-form behavior."""
    return {'harmonic': harmonic_plant(), 'contract': contracting_plant(), 'hopf': hopf_plant()}
