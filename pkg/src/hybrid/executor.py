from __future__ import annotations

import logging
from typing import Callable, Optional, Sequence, Union

import numpy as np

from src.hybrid.automaton import HybridAutomaton
from src.hybrid.errors import HybridError, InvariantExit, ResetContractError, TransitionNotEnabled
from src.hybrid.integrator import rk4_step
from src.hybrid.state import ContinuousStep, DiscreteJump, Event, HybridState, Trace

InputSchedule = Union[Callable[[int, HybridState], np.ndarray], Sequence[np.ndarray], None]

module_logger = logging.getLogger(__name__)


def continuous_step(automaton: HybridAutomaton, state: HybridState, u: np.ndarray, h: float) -> HybridState:
    """
    Advance the continuous state by one RK4 step under the location dynamics.

    Raises:
        ValueError: if u is outside the input box of the location.
        IntegrationDiverged: on a non-finite result.
        InvariantExit: if the new point leaves the location invariant; carries the new state.
    """
    location = automaton.location(state.location)
    u = np.asarray(u, dtype=float)
    if not location.input_box.contains(u):
        raise ValueError(f"input {u} outside the input box of {location.name}")
    x = rk4_step(location.dynamics, state.x, u, h)
    successor = HybridState(state.location, x, state.steps + 1, h)
    if not location.invariant_holds(x):
        raise InvariantExit(f"invariant of {location.name} violated at t={successor.t:g}", state=successor)
    return successor


def enabled_transitions(automaton: HybridAutomaton, state: HybridState) -> list[int]:
    return [t.id for t in automaton.outgoing(state.location) if t.guard.holds(state.x)]


def forced_transitions(automaton: HybridAutomaton, state: HybridState) -> list[int]:
    """Enabled transitions that must fire now: urgent ones and optional ones whose deadline holds."""
    return [t.id for t in automaton.outgoing(state.location)
            if t.guard.holds(state.x) and t.is_forced(state.x)]


def take_transition(automaton: HybridAutomaton, state: HybridState, transition_id: int) -> HybridState:
    """
    Fire a transition: switch location and apply the reset. Time is unchanged.

    Raises:
        TransitionNotEnabled: if the transition does not leave the current location or its guard fails.
        ResetContractError: if the reset lands outside the target invariant.
    """
    transition = automaton.transition(transition_id)
    if transition.source != state.location or not transition.guard.holds(state.x):
        raise TransitionNotEnabled(f"transition '{transition.name}' is not enabled in {state.location} at t={state.t:g}")
    x = transition.reset.apply(state.x)
    successor = HybridState(transition.target, x, state.steps, state.h)
    if not automaton.location(transition.target).invariant_holds(x):
        raise ResetContractError(f"reset of '{transition.name}' leaves the invariant of {transition.target}",
                                 transition_id=transition_id, state=successor)
    return successor


def _schedule_function(schedule: InputSchedule, automaton: HybridAutomaton):
    if schedule is None:
        return lambda step, state: automaton.location(state.location).input_box.zero()
    if callable(schedule):
        return schedule
    inputs = [np.asarray(u, dtype=float) for u in schedule]

    def lookup(step, state):
        if not inputs:
            return automaton.location(state.location).input_box.zero()
        return inputs[min(step, len(inputs) - 1)]
    return lookup


def _resolve_jumps(automaton, state, policy, trace, max_jumps):
    for _ in range(max_jumps):
        enabled = enabled_transitions(automaton, state)
        if not enabled:
            return state
        chosen = policy.choose(automaton, state, enabled)
        if chosen is None:
            return state
        transition = automaton.transition(chosen)
        state = take_transition(automaton, state, chosen)
        trace.append(state, DiscreteJump(chosen, transition.source, transition.target))
    raise HybridError(f"more than {max_jumps} jumps at t={state.t:g}")


def simulate(automaton: HybridAutomaton, schedule: InputSchedule, policy, n_steps: int, h: float,
             initial: Optional[HybridState] = None, clamp_inputs: bool = True,
             logger: Optional[logging.Logger] = None) -> Trace:
    """
    Execute the automaton for `n_steps` continuous steps of length h.

    Each iteration applies the scheduled input (saturated at parameter-box edges when
    `clamp_inputs` is set), takes one continuous step, then lets the policy fire enabled
    transitions at the new instant.

    Args:
        automaton (HybridAutomaton): Automaton to execute.
        schedule: Callable (step, state) -> u, a per-step sequence of inputs (the last one repeats),
            or None for zero input.
        policy (ITransitionPolicy): Transition policy.
        n_steps (int): Number of continuous steps, >= 0.
        h (float): Step length.
        initial (HybridState, optional): Start state; defaults to the automaton's initial state.
        clamp_inputs (bool): Apply the location's input saturation before each step.
        logger (logging.Logger, optional): Logger instance.

    Returns:
        Trace: Every visited state, including post-jump states.

    Raises:
        HybridError: integration, invariant or reset errors, with `partial_trace` attached.
    """
    logger = logger or module_logger
    if n_steps < 0:
        raise ValueError(f"n_steps must be >= 0, got {n_steps}")
    state = initial if initial is not None else automaton.initial_hybrid_state()
    trace = Trace.start(state)
    inputs = _schedule_function(schedule, automaton)
    max_jumps = len(automaton.transitions()) + 1
    try:
        for step in range(n_steps):
            if policy.should_stop(state):
                logger.debug(f"Policy stopped {automaton.name()} at t={state.t:g}")
                break
            location = automaton.location(state.location)
            u = np.asarray(inputs(step, state), dtype=float)
            if clamp_inputs:
                u = location.saturate(state.x, u, h)
            state = continuous_step(automaton, state, u, h)
            trace.append(state, ContinuousStep(u, h))
            state = _resolve_jumps(automaton, state, policy, trace, max_jumps)
    except HybridError as e:
        e.partial_trace = trace
        logger.debug(f"Simulation of {automaton.name()} stopped at t={state.t:g}: {e}")
        raise
    return trace


def replay(automaton: HybridAutomaton, actions: Sequence[Event], initial: Optional[HybridState] = None) -> Trace:
    """
    Re-execute an explicit action list (inputs are used as recorded, no saturation).

    Raises:
        HybridError: if an action cannot be executed; `partial_trace` is attached.
    """
    state = initial if initial is not None else automaton.initial_hybrid_state()
    trace = Trace.start(state)
    try:
        for action in actions:
            if isinstance(action, ContinuousStep):
                state = continuous_step(automaton, state, action.u, action.h)
            else:
                state = take_transition(automaton, state, action.transition_id)
            trace.append(state, action)
    except HybridError as e:
        e.partial_trace = trace
        raise
    return trace
