from abc import ABC, abstractmethod
import numpy as np


class IPredicate(ABC):
    @abstractmethod
    def value(self, x: np.ndarray) -> float:
        """
        Evaluate the real-valued function g of the predicate g(x) ~ 0.

        Args:
            x (np.ndarray): The full continuous state.

        Returns:
            float: g(x).
        """
        pass

    @abstractmethod
    def holds(self, x: np.ndarray) -> bool:
        """
        Check the predicate at a continuous state.

        Args:
            x (np.ndarray): The full continuous state.

        Returns:
            bool: True when g(x) ~ 0 holds.
        """
        pass

    @abstractmethod
    def support(self) -> tuple[int, ...]:
        """Indices of the state coordinates g depends on."""
        pass
