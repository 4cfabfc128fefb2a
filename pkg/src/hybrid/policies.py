from typing import Mapping, Optional

from src.hybrid.executor import forced_transitions
from src.interfaces.ITransitionPolicy import ITransitionPolicy


class ForcedTransitionPolicy(ITransitionPolicy):
    """Fires the lowest-id forced transition: urgent ones when enabled, optional ones at their deadline."""

    def choose(self, automaton, state, enabled: list[int]) -> Optional[int]:
        forced = forced_transitions(automaton, state)
        return forced[0] if forced else None


class FirstEnabledPolicy(ITransitionPolicy):
    def choose(self, automaton, state, enabled: list[int]) -> Optional[int]:
        return enabled[0] if enabled else None


class NeverJumpPolicy(ITransitionPolicy):
    def choose(self, automaton, state, enabled: list[int]) -> Optional[int]:
        return None


class ScriptedPolicy(ITransitionPolicy):
    """
    Fires the transition scheduled for a step count when it is enabled there, and otherwise
    falls back to `fallback` (default: no jump).
    """

    def __init__(self, schedule: Mapping[int, int], fallback: Optional[ITransitionPolicy] = None, stop_after: Optional[int] = None):
        self._schedule = dict(schedule)
        self._fallback = fallback
        self._stop_after = stop_after

    def choose(self, automaton, state, enabled: list[int]) -> Optional[int]:
        scheduled = self._schedule.get(state.steps)
        if scheduled is not None and scheduled in enabled:
            return scheduled
        if self._fallback is not None:
            return self._fallback.choose(automaton, state, enabled)
        return None

    def should_stop(self, state) -> bool:
        return self._stop_after is not None and state.steps >= self._stop_after
