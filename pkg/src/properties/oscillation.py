import logging
from enum import IntEnum
from typing import Optional, Sequence

import numpy as np

from src.hybrid.automaton import ConstantExpr, CoordinateExpr, HybridAutomaton, Location, ResetMap, Transition
from src.hybrid.predicates import (AffinePredicate, Guard, beyond_epsilon, clock_after, clock_crossing, clock_matches,
                                   clock_within, within_epsilon)
from src.models.plant import PlantDefinition
from src.properties.layout import MemoryForm, OscillationLayout
from src.properties.specs import OscillationSpec, PropertySpecError

INIT = 'INIT'
LRN = 'LRN'
STD = 'STD'
OSC = 'OSC'

PROPERTY_LOCATIONS = (INIT, LRN, STD, OSC)


class OscillationTransition(IntEnum):
    START_LEARNING = 0
    LEARN_STEADY = 1
    LEARN_PERIOD = 2
    STEADY_CHECK = 3
    STEADY_LOST = 4
    PERIOD_CHECK = 5
    PERIOD_LOST = 6


def _check_dimensions(spec: OscillationSpec, plant: PlantDefinition):
    if spec.plant_dim != plant.dimension or spec.param_dim != plant.param_dim():
        raise PropertySpecError(f"spec expects n={spec.plant_dim}, m={spec.param_dim} but {plant.name} "
                                f"has n={plant.dimension}, m={plant.param_dim()}")


def _dynamics(plant: PlantDefinition, layout: OscillationLayout):
    n, m = layout.plant_dim, layout.param_dim
    clock = layout.clock
    memory = layout.memory()
    tracks_plant = layout.form is MemoryForm.DIFFERENCE

    def f(y: np.ndarray, u: np.ndarray) -> np.ndarray:
        dy = np.zeros_like(y)
        dy[:n + m] = plant.vector_field(y[:n + m], u)
        dy[clock] = 1.0
        if tracks_plant:
            dy[memory.start:memory.stop] = dy[:n]
        return dy
    return f


def _memory_reset(layout: OscillationLayout) -> list:
    if layout.form is MemoryForm.DIFFERENCE:
        return [(j, ConstantExpr(0.0)) for j in layout.memory()]
    return [(j, CoordinateExpr(i)) for i, j in zip(layout.plant(), layout.memory())]


def _return_checks(spec: OscillationSpec, layout: OscillationLayout):
    if layout.form is MemoryForm.DIFFERENCE:
        coordinates, references = layout.memory_of(spec.monitored), None
    else:
        coordinates, references = spec.monitored, layout.memory_of(spec.monitored)
    return within_epsilon(coordinates, spec.epsilon, references), beyond_epsilon(coordinates, spec.epsilon, references)


def build_oscillation_automaton(spec: OscillationSpec, plant: PlantDefinition,
                                initial_state: Optional[Sequence[float]] = None,
                                form: MemoryForm = MemoryForm.STORED_POINT,
                                logger: Optional[logging.Logger] = None) -> HybridAutomaton:
    """
    Build the oscillation property automaton over the state [x, k, c, p, x_p] (or [x, k, c, p, z]).

    INIT waits up to T_i, LRN stores a point and learns the return time, STD and OSC re-check
    the return every learned period p. A miss in STD or OSC goes back to INIT.

    Args:
        spec (OscillationSpec): Property parameters.
        plant (PlantDefinition): Plant, possibly augmented with varied parameters.
        initial_state (Sequence[float], optional): x0; defaults to the plant's default state.
        form (MemoryForm): Stored point x_p, or the difference z = x - x_p.
        logger (logging.Logger, optional): Logger instance.

    Returns:
        HybridAutomaton: Locations INIT, LRN, STD, OSC with transitions numbered as OscillationTransition.

    Raises:
        PropertySpecError: if the spec does not match the plant dimensions.
    """
    _check_dimensions(spec, plant)
    layout = OscillationLayout.from_spec(spec, form)
    n, clock, period = plant.dimension, layout.clock, layout.period
    h = spec.h

    x0 = np.array(initial_state if initial_state is not None else plant.default_state, dtype=float)
    if len(x0) != n:
        raise PropertySpecError(f"initial state has {len(x0)} entries, expected {n}")
    memory0 = np.zeros(n) if form is MemoryForm.DIFFERENCE else x0
    y0 = np.concatenate([x0, plant.varied_nominal(), [0.0, 0.0], memory0])

    dynamics = _dynamics(plant, layout)
    invariant = plant.parameter_invariant(n)
    inputs = plant.inputs()
    saturation = plant.saturation(n)
    locations = [Location(name, dynamics, invariant, inputs, saturation) for name in PROPERTY_LOCATIONS]

    within, miss = _return_checks(spec, layout)
    reset_clock = [(clock, ConstantExpr(0.0))]
    reset_memory = _memory_reset(layout)
    learn = ResetMap([(period, CoordinateExpr(clock))] + reset_clock + reset_memory)
    restart = ResetMap(reset_clock + reset_memory)

    # INIT -> LRN may fire anywhere in (0, T_i] and must fire at the first sample with c >= T_i.
    reached, before_next = clock_crossing(clock, spec.t_init, h)
    start_guard = Guard((AffinePredicate.above(clock, 0.0, "c > 0"), before_next))
    start_deadline = Guard((reached,))

    transitions = [
        Transition(int(OscillationTransition.START_LEARNING), 'start_learning', INIT, LRN, start_guard, restart, start_deadline),
        Transition(int(OscillationTransition.LEARN_STEADY), 'learn_steady', LRN, STD,
                   Guard(clock_within(clock, spec.delta) + (within,)), learn),
        Transition(int(OscillationTransition.LEARN_PERIOD), 'learn_period', LRN, OSC,
                   Guard(clock_after(clock, spec.delta) + (within,)), learn),
        Transition(int(OscillationTransition.STEADY_CHECK), 'steady_check', STD, STD,
                   Guard(clock_matches(clock, period, h) + (within,)), ResetMap(reset_clock)),
        Transition(int(OscillationTransition.STEADY_LOST), 'steady_lost', STD, INIT,
                   Guard(clock_matches(clock, period, h) + (miss,)), ResetMap(reset_clock)),
        Transition(int(OscillationTransition.PERIOD_CHECK), 'period_check', OSC, OSC,
                   Guard(clock_matches(clock, period, h) + (within,)), restart),
        Transition(int(OscillationTransition.PERIOD_LOST), 'period_lost', OSC, INIT,
                   Guard(clock_matches(clock, period, h) + (miss,)), restart),
    ]
    name = f"{plant.name}-oscillation-{form.value}"
    return HybridAutomaton(name, locations, transitions, INIT, y0, layout.variable_names(plant), logger,
                           guard_check_box=layout.bounding_box(plant, spec.t_init))


def build_oscillation_automaton_z(spec: OscillationSpec, plant: PlantDefinition,
                                  initial_state: Optional[Sequence[float]] = None,
                                  logger: Optional[logging.Logger] = None) -> HybridAutomaton:
    """Difference form: z = x - x_p with z' = f(x, k); resets z := 0 replace x_p := x."""
    return build_oscillation_automaton(spec, plant, initial_state, MemoryForm.DIFFERENCE, logger)
