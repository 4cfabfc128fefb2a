from abc import ABC, abstractmethod
from typing import Optional


class ITransitionPolicy(ABC):
    @abstractmethod
    def choose(self, automaton, state, enabled: list[int]) -> Optional[int]:
        """
        Pick the transition to fire at the current instant.

        Args:
            automaton (HybridAutomaton): The automaton being executed.
            state (HybridState): The current state.
            enabled (list[int]): Ids of the enabled transitions, ascending.

        Returns:
            Optional[int]: A transition id from `enabled`, or None to keep flowing.
        """
        pass

    def should_stop(self, state) -> bool:
        """Stop the simulation before the next continuous step."""
        return False
