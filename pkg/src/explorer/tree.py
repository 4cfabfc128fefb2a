from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.hybrid.state import DiscreteJump, Event, HybridState, Trace, TraceEntry


@dataclass(frozen=True, eq=False)
class TreeNode:
    state: HybridState
    parent: Optional[int]
    action: Optional[Event]
    depth: int


class ExplorationTree:
    """
    Rooted tree of hybrid states; node i's parent always has a smaller index.

    States are also kept row-wise in a growing matrix so distance queries stay vectorized.
    """

    def __init__(self, root: HybridState):
        self._nodes: list[TreeNode] = [TreeNode(root, None, None, 0)]
        self._points = np.zeros((64, len(root.x)))
        self._points[0] = root.x
        self._location_codes: dict[str, int] = {}
        self._locations = np.zeros(64, dtype=int)
        self._locations[0] = self._code(root.location)
        self._exhausted = np.zeros(64, dtype=bool)

    def _code(self, location: str) -> int:
        return self._location_codes.setdefault(location, len(self._location_codes))

    def _grow(self):
        capacity = 2 * len(self._points)
        self._points = np.resize(self._points, (capacity, self._points.shape[1]))
        self._locations = np.resize(self._locations, capacity)
        exhausted = np.zeros(capacity, dtype=bool)
        exhausted[:len(self._exhausted)] = self._exhausted
        self._exhausted = exhausted

    def add(self, state: HybridState, parent: int, action: Event) -> int:
        if not 0 <= parent < len(self._nodes):
            raise IndexError(f"parent {parent} is not a node of the tree")
        index = len(self._nodes)
        if index == len(self._points):
            self._grow()
        self._nodes.append(TreeNode(state, parent, action, self._nodes[parent].depth + 1))
        self._points[index] = state.x
        self._locations[index] = self._code(state.location)
        return index

    def node(self, index: int) -> TreeNode:
        return self._nodes[index]

    def state(self, index: int) -> HybridState:
        return self._nodes[index].state

    def root(self) -> HybridState:
        return self._nodes[0].state

    def points(self) -> np.ndarray:
        """Continuous states of all nodes, one row per node (a view, do not modify)."""
        return self._points[:len(self._nodes)]

    def location_codes(self) -> np.ndarray:
        return self._locations[:len(self._nodes)]

    def location_code(self, location: str) -> Optional[int]:
        return self._location_codes.get(location)

    def mark_exhausted(self, index: int):
        self._exhausted[index] = True

    def is_exhausted(self, index: int) -> bool:
        return bool(self._exhausted[index])

    def exhausted_mask(self) -> np.ndarray:
        return self._exhausted[:len(self._nodes)]

    def path(self, index: int) -> list[int]:
        """Node indices from the root to `index`."""
        path = []
        current = index
        while current is not None:
            path.append(current)
            current = self._nodes[current].parent
        return path[::-1]

    def actions_to(self, index: int) -> list[Event]:
        return [self._nodes[i].action for i in self.path(index)[1:]]

    def trace_to(self, index: int) -> Trace:
        return Trace([TraceEntry(self._nodes[i].state, self._nodes[i].action) for i in self.path(index)])

    def deepest(self) -> int:
        depths = [node.depth for node in self._nodes]
        return int(np.argmax(depths))

    def is_jump(self, index: int) -> bool:
        return isinstance(self._nodes[index].action, DiscreteJump)

    def __len__(self):
        return len(self._nodes)
