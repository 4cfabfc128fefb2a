from abc import ABC, abstractmethod
from typing import Optional
import numpy as np


class IRegion(ABC):
    @abstractmethod
    def contains(self, x: np.ndarray) -> bool:
        pass

    @abstractmethod
    def is_empty(self) -> bool:
        """
        Report emptiness of the region.

        Returns:
            bool: True only when the region is known to be empty.
        """
        pass

    @abstractmethod
    def sample(self, rng: np.random.Generator, lower: np.ndarray, upper: np.ndarray) -> Optional[np.ndarray]:
        """
        Draw a point of the region intersected with the box [lower, upper].

        Args:
            rng (np.random.Generator): Random stream.
            lower (np.ndarray): Lower corner of the bounding box, full state dimension.
            upper (np.ndarray): Upper corner of the bounding box, full state dimension.

        Returns:
            Optional[np.ndarray]: A full state vector, or None when the intersection is empty
            or no point was found.
        """
        pass
