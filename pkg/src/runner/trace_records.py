import csv
from typing import TextIO

from src.hybrid.automaton import HybridAutomaton
from src.hybrid.state import ContinuousStep, DiscreteJump, Trace

EVENT_START = 'start'
EVENT_STEP = 'step'
EVENT_JUMP = 'jump'


def trace_header(automaton: HybridAutomaton) -> list[str]:
    """seq, step, t, location, event, transition, every state variable, then u1..ud."""
    input_dim = automaton.location(automaton.initial_location()).input_box.dimension()
    return (['seq', 'step', 't', 'location', 'event', 'transition'] + list(automaton.variable_names())
            + [f"u{i + 1}" for i in range(input_dim)])


def trace_rows(trace: Trace, automaton: HybridAutomaton) -> list[list[str]]:
    """
    One row per trace entry. Floats are written with repr so a reread trace is bit-identical.
    Jump rows carry the transition name and leave the input columns empty.
    """
    input_dim = automaton.location(automaton.initial_location()).input_box.dimension()
    rows = []
    for seq, entry in enumerate(trace):
        state, event = entry.state, entry.event
        if isinstance(event, ContinuousStep):
            kind, transition, inputs = EVENT_STEP, '', [repr(float(v)) for v in event.u]
        elif isinstance(event, DiscreteJump):
            kind, transition = EVENT_JUMP, automaton.transition(event.transition_id).name
            inputs = [''] * input_dim
        else:
            kind, transition, inputs = EVENT_START, '', [''] * input_dim
        rows.append([str(seq), str(state.steps), repr(state.t), state.location, kind, transition]
                    + [repr(float(v)) for v in state.x] + inputs)
    return rows


def write_trace_csv(trace: Trace, automaton: HybridAutomaton, stream: TextIO):
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(trace_header(automaton))
    writer.writerows(trace_rows(trace, automaton))


def first_jump_row(rows: list[list[str]], source: str, target: str) -> int:
    """Index of the first jump row entering `target` whose previous row is in `source`, -1 if none."""
    for i in range(1, len(rows)):
        if rows[i][4] == EVENT_JUMP and rows[i][3] == target and rows[i - 1][3] == source:
            return i
    return -1
