from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from src.hybrid.automaton import HybridAutomaton, InputBox, InputSaturation, Location
from src.hybrid.executor import simulate
from src.hybrid.policies import NeverJumpPolicy
from src.hybrid.predicates import AffinePredicate

PlantDynamics = Callable[[np.ndarray, np.ndarray], np.ndarray]

RUN_LOCATION = 'RUN'


class PlantError(Exception):
    pass


@dataclass(frozen=True, eq=False)
class PlantDefinition:
    """
    A parametric ODE x' = f(x, k), optionally with some parameters promoted to state.

    Varied parameters (indices into k) become coordinates with k_i' = u_i, bounded by
    `parameter_box`; all other parameters stay frozen at their nominal value.

    Attributes:
        name (str): Catalog name.
        dimension (int): n, the number of model variables.
        dynamics (PlantDynamics): f(x, k) with the full parameter vector k.
        parameters (tuple[float, ...]): Nominal k.
        default_state (tuple[float, ...]): Documented default x0.
        lower_bounds (tuple[float, ...]): Recommended bounding box of x, lower corner.
        upper_bounds (tuple[float, ...]): Recommended bounding box of x, upper corner.
        variable_names (tuple[str, ...]): Names of x.
        parameter_names (tuple[str, ...]): Names of k.
        parameter_units (tuple[str, ...]): Unit strings of k, documentation only.
        description (str): Closed-form or provenance notes.
        varied (tuple[int, ...]): Indices of the varied parameters.
        parameter_box (tuple[tuple[float, float], ...]): Box of each varied parameter.
        input_box (tuple[tuple[float, float], ...]): Box of each parameter derivative u_i.
    """
    name: str
    dimension: int
    dynamics: PlantDynamics
    parameters: tuple[float, ...]
    default_state: tuple[float, ...]
    lower_bounds: tuple[float, ...]
    upper_bounds: tuple[float, ...]
    variable_names: tuple[str, ...]
    parameter_names: tuple[str, ...]
    parameter_units: tuple[str, ...] = ()
    description: str = ''
    varied: tuple[int, ...] = ()
    parameter_box: tuple[tuple[float, float], ...] = ()
    input_box: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if len(self.default_state) != self.dimension:
            raise PlantError(f"{self.name}: default state has {len(self.default_state)} entries, expected {self.dimension}")
        if len(self.lower_bounds) != self.dimension or len(self.upper_bounds) != self.dimension:
            raise PlantError(f"{self.name}: bounding box does not match dimension {self.dimension}")
        if len(self.variable_names) != self.dimension:
            raise PlantError(f"{self.name}: {len(self.variable_names)} variable names for dimension {self.dimension}")
        if len(self.parameter_names) != len(self.parameters):
            raise PlantError(f"{self.name}: {len(self.parameter_names)} parameter names for {len(self.parameters)} parameters")

    def param_dim(self) -> int:
        return len(self.varied)

    def state_dimension(self) -> int:
        return self.dimension + self.param_dim()

    def nominal(self) -> np.ndarray:
        return np.array(self.parameters, dtype=float)

    def varied_nominal(self) -> np.ndarray:
        return np.array([self.parameters[i] for i in self.varied], dtype=float)

    def varied_names(self) -> tuple[str, ...]:
        return tuple(self.parameter_names[i] for i in self.varied)

    def full_parameters(self, k_varied: np.ndarray) -> np.ndarray:
        k = self.nominal()
        if self.varied:
            k[list(self.varied)] = k_varied
        return k

    def evaluate(self, x: np.ndarray, k_varied: np.ndarray) -> np.ndarray:
        """f(x, k) with the varied entries of k taken from `k_varied`."""
        return np.asarray(self.dynamics(x, self.full_parameters(k_varied)), dtype=float)

    def vector_field(self, y: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Dynamics of the augmented state y = (x, k_varied): (f(x, k), u)."""
        n = self.dimension
        dx = self.evaluate(y[:n], y[n:n + self.param_dim()])
        return np.concatenate([dx, np.asarray(u, dtype=float)])

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array(self.lower_bounds, dtype=float), np.array(self.upper_bounds, dtype=float)

    def parameter_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.array([lo for lo, _ in self.parameter_box], dtype=float),
                np.array([hi for _, hi in self.parameter_box], dtype=float))

    def inputs(self) -> InputBox:
        return InputBox(tuple(lo for lo, _ in self.input_box), tuple(hi for _, hi in self.input_box))

    def saturation(self, offset: int) -> Optional[InputSaturation]:
        """Input saturation for varied parameters stored from coordinate `offset` on."""
        if not self.varied:
            return None
        lower, upper = self.parameter_bounds()
        return InputSaturation(tuple(offset + i for i in range(self.param_dim())), tuple(lower), tuple(upper))

    def parameter_invariant(self, offset: int) -> tuple[AffinePredicate, ...]:
        """lo_i <= k_i <= hi_i for varied parameters stored from coordinate `offset` on."""
        predicates = []
        for i, (lo, hi) in enumerate(self.parameter_box):
            name = self.parameter_names[self.varied[i]]
            predicates.append(AffinePredicate.at_least(offset + i, lo, f"{name} >= {lo:g}"))
            predicates.append(AffinePredicate.at_most(offset + i, hi, f"{name} <= {hi:g}"))
        return tuple(predicates)

    def clamp_input(self, y: np.ndarray, u: np.ndarray, h: float) -> np.ndarray:
        """Zero every input component whose parameter would leave its box within one step."""
        saturation = self.saturation(self.dimension)
        if saturation is None:
            return np.asarray(u, dtype=float)
        return saturation.clamp(y, u, h)


def augment_with_parameters(plant: PlantDefinition, varied: Sequence[int],
                            parameter_boxes: Sequence[tuple[float, float]],
                            input_boxes: Sequence[tuple[float, float]]) -> PlantDefinition:
    """
    Promote parameters to state coordinates with k_i' = u_i.

    Args:
        plant (PlantDefinition): Plant with no varied parameters yet.
        varied (Sequence[int]): Parameter indices (0-based) to vary.
        parameter_boxes (Sequence[tuple[float, float]]): Box of each varied parameter.
        input_boxes (Sequence[tuple[float, float]]): Box of each derivative u_i.

    Returns:
        PlantDefinition: Plant of state dimension n + len(varied).

    Raises:
        PlantError: on repeated or out-of-range indices, mismatched box counts, inverted boxes,
            or a nominal value outside its box.
    """
    varied = tuple(int(i) for i in varied)
    if len(set(varied)) != len(varied) or set(varied) & set(plant.varied):
        raise PlantError(f"{plant.name}: overlapping varied parameter indices {varied}")
    if any(i < 0 or i >= len(plant.parameters) for i in varied):
        raise PlantError(f"{plant.name}: varied index out of range in {varied}")
    if len(parameter_boxes) != len(varied) or len(input_boxes) != len(varied):
        raise PlantError(f"{plant.name}: expected {len(varied)} parameter and input boxes")
    parameter_boxes = tuple((float(lo), float(hi)) for lo, hi in parameter_boxes)
    input_boxes = tuple((float(lo), float(hi)) for lo, hi in input_boxes)
    for i, (lo, hi) in zip(varied, parameter_boxes):
        if lo > hi:
            raise PlantError(f"{plant.name}: empty box [{lo}, {hi}] for {plant.parameter_names[i]}")
        if not lo <= plant.parameters[i] <= hi:
            raise PlantError(f"{plant.name}: nominal {plant.parameter_names[i]}={plant.parameters[i]} outside [{lo}, {hi}]")
    if any(lo > hi for lo, hi in input_boxes):
        raise PlantError(f"{plant.name}: inverted input box in {input_boxes}")
    return dataclasses.replace(plant, varied=plant.varied + varied,
                               parameter_box=plant.parameter_box + parameter_boxes,
                               input_box=plant.input_box + input_boxes)


def build_plant_automaton(plant: PlantDefinition, initial_state: Optional[Sequence[float]] = None,
                          logger: Optional[logging.Logger] = None) -> HybridAutomaton:
    """One-location automaton RUN over (x, k_varied) with the parameter box as invariant."""
    x0 = np.array(initial_state if initial_state is not None else plant.default_state, dtype=float)
    y0 = np.concatenate([x0, plant.varied_nominal()])
    location = Location(RUN_LOCATION, plant.vector_field, plant.parameter_invariant(plant.dimension),
                        plant.inputs(), plant.saturation(plant.dimension))
    names = plant.variable_names + plant.varied_names()
    return HybridAutomaton(f"{plant.name}-plant", [location], [], RUN_LOCATION, y0, names, logger)


def calibrate_initial_state(plant: PlantDefinition, horizon: float, h: float,
                            start: Optional[Sequence[float]] = None,
                            logger: Optional[logging.Logger] = None) -> np.ndarray:
    """
    Simulate the plant at nominal parameters with zero input from `start` (default all ones)
    for `horizon` time units and return the end point.
    """
    logger = logger or logging.getLogger(__name__)
    start = np.ones(plant.dimension) if start is None else np.array(start, dtype=float)
    automaton = build_plant_automaton(plant, start, logger)
    n_steps = int(math.ceil(horizon / h - 1e-9))
    trace = simulate(automaton, None, NeverJumpPolicy(), n_steps, h, logger=logger)
    x0 = trace.final_state().x[:plant.dimension].copy()
    logger.info(f"Calibrated initial state of {plant.name} over {n_steps} steps: {np.array2string(x0, precision=6)}")
    return x0
