from dataclasses import dataclass

import numpy as np

from src.explorer.tree import ExplorationTree
from src.hybrid.state import HybridState


@dataclass(frozen=True)
class HybridMetric:
    """Weighted Euclidean distance on `coordinates`, plus `penalty` when the locations differ."""
    coordinates: tuple[int, ...]
    weights: tuple[float, ...]
    penalty: float

    def __post_init__(self):
        if len(self.coordinates) != len(self.weights):
            raise ValueError(f"{len(self.weights)} weights for {len(self.coordinates)} coordinates")
        if self.penalty < 0.0:
            raise ValueError(f"penalty must be >= 0, got {self.penalty}")

    @staticmethod
    def uniform(coordinates, penalty: float) -> 'HybridMetric':
        coordinates = tuple(int(i) for i in coordinates)
        return HybridMetric(coordinates, (1.0,) * len(coordinates), float(penalty))

    @staticmethod
    def box_diameter(coordinates, weights, lower: np.ndarray, upper: np.ndarray) -> float:
        span = (np.asarray(upper) - np.asarray(lower))[list(coordinates)]
        return float(np.sqrt(np.sum(np.asarray(weights) * span * span)))


def hybrid_distance(a: HybridState, b: HybridState, metric: HybridMetric) -> float:
    index = list(metric.coordinates)
    diff = a.x[index] - b.x[index]
    distance = float(np.sqrt(np.sum(np.asarray(metric.weights) * diff * diff)))
    if a.location != b.location:
        distance += metric.penalty
    return distance


def nearest_neighbor(tree: ExplorationTree, goal: HybridState, metric: HybridMetric, skip_exhausted: bool = True) -> int:
    """
    Index of the node closest to the goal; the lowest index wins ties.

    Returns -1 when every node is exhausted and `skip_exhausted` is set.
    """
    index = list(metric.coordinates)
    diff = tree.points()[:, index] - goal.x[index]
    distances = np.sqrt(np.sum(np.asarray(metric.weights) * diff * diff, axis=1))
    code = tree.location_code(goal.location)
    code = -1 if code is None else code
    distances = distances + np.where(tree.location_codes() == code, 0.0, metric.penalty)
    if skip_exhausted:
        distances = np.where(tree.exhausted_mask(), np.inf, distances)
        if np.all(np.isinf(distances)):
            return -1
    return int(np.argmin(distances))
