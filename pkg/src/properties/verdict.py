from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from src.hybrid.state import Trace
from src.properties.layout import MemoryForm, OscillationLayout
from src.properties.oscillation import INIT, LRN, OSC, PROPERTY_LOCATIONS, STD
from src.properties.specs import OscillationSpec


class ClassificationError(Exception):
    pass


class VerdictKind(Enum):
    OSCILLATING = 'Oscillating'
    STEADY = 'Steady'
    FALSIFIED = 'Falsified'
    INCONCLUSIVE = 'Inconclusive'


@dataclass(frozen=True, eq=False)
class Verdict:
    """
    Outcome of monitoring one trace.

    Attributes:
        kind (VerdictKind): The verdict.
        period (float, optional): Learned p (Oscillating, Steady, or the period in force when falsified).
        witness_time (float, optional): Time of the falsifying jump.
        exit_value (float, optional): Signed largest deviation x - x_p on the monitored coordinates at that jump.
        witness_index (int, optional): Trace index of the falsifying jump.
        cycles (int): Completed self-checks in the learned mode.
        evidence (Trace, optional): Trace slice from the learning jump on.
        evidence_range (tuple[int, int], optional): Bounds of `evidence` in the classified trace.
    """
    kind: VerdictKind
    period: Optional[float] = None
    witness_time: Optional[float] = None
    exit_value: Optional[float] = None
    witness_index: Optional[int] = None
    cycles: int = 0
    evidence: Optional[Trace] = field(default=None, repr=False)
    evidence_range: Optional[tuple[int, int]] = None

    def is_falsified(self) -> bool:
        return self.kind is VerdictKind.FALSIFIED

    def to_dict(self) -> dict:
        return {
            'kind': self.kind.value,
            'period': self.period,
            'witness_time': self.witness_time,
            'exit_value': self.exit_value,
            'witness_index': self.witness_index,
            'cycles': self.cycles,
            'evidence_range': list(self.evidence_range) if self.evidence_range is not None else None,
        }

    def __eq__(self, other):
        return isinstance(other, Verdict) and self.to_dict() == other.to_dict()


def _signed_extreme(values: np.ndarray) -> float:
    return float(values[int(np.argmax(np.abs(values)))])


def classify_trace(trace: Trace, spec: OscillationSpec, form: MemoryForm = MemoryForm.DIFFERENCE) -> Verdict:
    """
    Classify a trace of an oscillation property automaton.

    Falsified at the first STD -> INIT or OSC -> INIT jump. Otherwise Oscillating (or Steady)
    once OSC (or STD) completed `spec.min_cycles` self-checks, else Inconclusive.

    Raises:
        ClassificationError: if the trace is empty or visits a location the property automaton lacks.
    """
    if len(trace) == 0:
        raise ClassificationError("empty trace")
    unknown = set(trace.location_sequence()) - set(PROPERTY_LOCATIONS)
    if unknown:
        raise ClassificationError(f"trace visits non-property locations {sorted(unknown)}")
    layout = OscillationLayout.from_spec(spec, form)

    learned_at = None
    period = None
    osc_cycles = 0
    std_cycles = 0
    for index, jump in trace.jumps():
        state = trace[index].state
        if jump.source == LRN:
            learned_at = index
            period = float(state.x[layout.period])
            osc_cycles = std_cycles = 0
        elif jump.source == OSC and jump.target == OSC:
            osc_cycles += 1
        elif jump.source == STD and jump.target == STD:
            std_cycles += 1
        elif jump.source in (OSC, STD) and jump.target == INIT:
            before = trace[index - 1].state
            deviation = layout.deviation(before.x, spec.monitored)
            cycles = osc_cycles if jump.source == OSC else std_cycles
            return Verdict(VerdictKind.FALSIFIED, period, state.t, _signed_extreme(deviation), index, cycles,
                           trace.slice(learned_at, index + 1), (learned_at, index + 1))

    if learned_at is not None:
        mode = trace[learned_at].state.location
        evidence = (trace.slice(learned_at), (learned_at, len(trace)))
        if mode == OSC and osc_cycles >= spec.min_cycles:
            return Verdict(VerdictKind.OSCILLATING, period, cycles=osc_cycles, evidence=evidence[0], evidence_range=evidence[1])
        if mode == STD and std_cycles >= spec.min_cycles:
            return Verdict(VerdictKind.STEADY, period, cycles=std_cycles, evidence=evidence[0], evidence_range=evidence[1])
    return Verdict(VerdictKind.INCONCLUSIVE, period, cycles=max(osc_cycles, std_cycles))
