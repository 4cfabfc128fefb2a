from abc import ABC, abstractmethod
import numpy as np


class IGoalSampler(ABC):
    @abstractmethod
    def sample_goal(self, rng: np.random.Generator):
        """
        Draw the next goal state of the exploration.

        Args:
            rng (np.random.Generator): The run's random stream.

        Returns:
            HybridState: Goal location and continuous point.
        """
        pass

    @abstractmethod
    def goal_counts(self) -> dict[str, int]:
        """Number of goals drawn per abstract state (or location) label."""
        pass

    def empty_cell_warnings(self) -> int:
        return 0

    def goal_log(self) -> list[tuple[int, str, np.ndarray]]:
        """(iteration, label, goal point) rows when logging is enabled."""
        return []
