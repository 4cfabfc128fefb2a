import logging
from typing import Optional, Sequence

import numpy as np

from src.hybrid.automaton import AffineExpr, ConstantExpr, HybridAutomaton, Location, ResetMap, Transition
from src.hybrid.predicates import AffinePredicate, Guard, Relation, clock_crossing
from src.hybrid.state import Trace
from src.models.plant import PlantDefinition
from src.properties.layout import OvershootLayout
from src.properties.specs import OvershootSpec, PropertySpecError

OS = 'OS'

PEAK_UPDATE = 0
PEAK_TICK = 1


def build_overshoot_automaton(spec: OvershootSpec, plant: PlantDefinition,
                              initial_state: Optional[Sequence[float]] = None,
                              logger: Optional[logging.Logger] = None) -> HybridAutomaton:
    """
    Single-location monitor of the peak omega = max (x - x*) over samples taken every delta.

    Two self-loops fire when c reaches delta: `peak_update` stores omega := x - x* when the
    output is above the reference by more than omega, `peak_tick` only restarts the clock.
    Both reset c, so the output is sampled on the delta grid.
    """
    if spec.plant_dim != plant.dimension or spec.param_dim != plant.param_dim():
        raise PropertySpecError(f"spec expects n={spec.plant_dim}, m={spec.param_dim} but {plant.name} "
                                f"has n={plant.dimension}, m={plant.param_dim()}")
    layout = OvershootLayout(spec.plant_dim, spec.param_dim)
    n, m = plant.dimension, plant.param_dim()
    x_index, ref, clock, peak = spec.monitored, layout.reference, layout.clock, layout.peak

    x0 = np.array(initial_state if initial_state is not None else plant.default_state, dtype=float)
    y0 = np.concatenate([x0, plant.varied_nominal(), np.array(spec.reference_initial, dtype=float), [0.0, 0.0]])

    def dynamics(y: np.ndarray, u: np.ndarray) -> np.ndarray:
        dy = np.zeros_like(y)
        dy[:n + m] = plant.vector_field(y[:n + m], u)
        dy[ref] = np.asarray(spec.reference_dynamics(y[ref:ref + 1]), dtype=float)[0]
        dy[clock] = 1.0
        return dy

    location = Location(OS, dynamics, plant.parameter_invariant(n), plant.inputs(), plant.saturation(n))
    sample = clock_crossing(clock, spec.delta, spec.h)
    above = AffinePredicate({x_index: 1.0, ref: -1.0}, 0.0, Relation.GT, "x > x*")
    exceeds = AffinePredicate({x_index: 1.0, ref: -1.0, peak: -1.0}, 0.0, Relation.GT, "x - x* > omega")
    reset_clock = (clock, ConstantExpr(0.0))
    transitions = [
        Transition(PEAK_UPDATE, 'peak_update', OS, OS, Guard((above,) + sample + (exceeds,)),
                   ResetMap([reset_clock, (peak, AffineExpr(((x_index, 1.0), (ref, -1.0))))])),
        Transition(PEAK_TICK, 'peak_tick', OS, OS, Guard(sample), ResetMap([reset_clock])),
    ]
    names = plant.variable_names + plant.varied_names() + ('x_ref', 'c', 'omega')
    return HybridAutomaton(f"{plant.name}-overshoot", [location], transitions, OS, y0, names, logger)


def overshoot_value(trace: Trace, layout: OvershootLayout) -> float:
    """omega at the end of the trace."""
    return float(trace.final_state().x[layout.peak])
