from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Union

import numpy as np


@dataclass(frozen=True, eq=False)
class HybridState:
    """
    A state (q, x) of a hybrid automaton.

    Time is kept as a step count: `t` is always `steps * h`, never an accumulated sum.
    """
    location: str
    x: np.ndarray
    steps: int = 0
    h: float = 0.0

    @property
    def t(self) -> float:
        return self.steps * self.h

    def same_as(self, other: HybridState) -> bool:
        return (self.location == other.location and self.steps == other.steps
                and np.array_equal(self.x, other.x))

    def __repr__(self):
        return f"HybridState({self.location}, t={self.t:g}, x={np.array2string(self.x, precision=4)})"


@dataclass(frozen=True, eq=False)
class ContinuousStep:
    u: np.ndarray
    h: float

    def to_dict(self) -> dict:
        return {'kind': 'input', 'u': [float(v) for v in self.u], 'h': self.h}

    def __eq__(self, other):
        return isinstance(other, ContinuousStep) and self.h == other.h and np.array_equal(self.u, other.u)


@dataclass(frozen=True)
class DiscreteJump:
    transition_id: int
    source: str = ''
    target: str = ''

    def to_dict(self) -> dict:
        return {'kind': 'jump', 'transition': self.transition_id, 'source': self.source, 'target': self.target}


Event = Union[ContinuousStep, DiscreteJump]


def event_from_dict(data: dict) -> Event:
    if data['kind'] == 'input':
        return ContinuousStep(np.array(data['u'], dtype=float), float(data['h']))
    if data['kind'] == 'jump':
        return DiscreteJump(int(data['transition']), data.get('source', ''), data.get('target', ''))
    raise ValueError(f"unknown event kind '{data['kind']}'")


@dataclass(frozen=True, eq=False)
class TraceEntry:
    state: HybridState
    event: Optional[Event]


class Trace:
    """Ordered (state, event) pairs; the first entry is the initial state with no event."""

    def __init__(self, entries: Optional[list[TraceEntry]] = None):
        self._entries: list[TraceEntry] = list(entries or [])

    @staticmethod
    def start(state: HybridState) -> Trace:
        return Trace([TraceEntry(state, None)])

    def append(self, state: HybridState, event: Event):
        self._entries.append(TraceEntry(state, event))

    def entries(self) -> list[TraceEntry]:
        return self._entries

    def states(self) -> list[HybridState]:
        return [entry.state for entry in self._entries]

    def events(self) -> list[Event]:
        return [entry.event for entry in self._entries[1:]]

    def final_state(self) -> HybridState:
        return self._entries[-1].state

    def jumps(self) -> Iterator[tuple[int, DiscreteJump]]:
        for index, entry in enumerate(self._entries):
            if isinstance(entry.event, DiscreteJump):
                yield index, entry.event

    def location_sequence(self) -> list[str]:
        return [entry.state.location for entry in self._entries]

    def continuous_steps(self) -> int:
        return sum(1 for entry in self._entries if isinstance(entry.event, ContinuousStep))

    def slice(self, start: int, stop: Optional[int] = None) -> Trace:
        return Trace(self._entries[start:stop])

    def __len__(self):
        return len(self._entries)

    def __getitem__(self, index: int) -> TraceEntry:
        return self._entries[index]

    def __iter__(self):
        return iter(self._entries)
