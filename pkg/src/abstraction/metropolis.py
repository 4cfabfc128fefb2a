from __future__ import annotations

from typing import Iterable, Mapping, Optional

import networkx as nx
import numpy as np
import scipy.linalg

from src.abstraction.transition_system import AbstractionError, AbstractState, AbstractTransitionSystem, EdgeKind


class TargetDistribution:
    """Positive weights per abstract state, normalized to sum 1."""

    def __init__(self, weights: Mapping[AbstractState, float]):
        if not weights:
            raise AbstractionError("empty target distribution")
        bad = {str(s): w for s, w in weights.items() if not w > 0.0}
        if bad:
            raise AbstractionError(f"target probabilities must be positive: {bad}")
        total = float(sum(weights.values()))
        self._raw = dict(weights)
        self._probabilities = {s: float(w) / total for s, w in weights.items()}

    def probability(self, state: AbstractState) -> float:
        return self._probabilities[state]

    def weight(self, state: AbstractState) -> float:
        """The weight before normalization."""
        return self._raw[state]

    def vector(self, states: Iterable[AbstractState]) -> np.ndarray:
        return np.array([self._probabilities[s] for s in states])

    def states(self) -> list[AbstractState]:
        return list(self._probabilities)


def violation_states(system: AbstractTransitionSystem, source_location: str, target_location: str) -> list[AbstractState]:
    """States of `source_location` with a discrete edge into `target_location`."""
    return [s for s in system.states_of(source_location)
            if any(t.location == target_location and EdgeKind.DISCRETE in system.edge_kinds(s, t)
                   for t in system.successors(s))]


def target_distribution(system: AbstractTransitionSystem, default: float = 0.1, favored: Iterable[AbstractState] = (),
                        favored_weight: float = 0.25, overrides: Optional[Mapping[AbstractState, float]] = None) -> TargetDistribution:
    """
    Weights `default` everywhere, `favored_weight` on favored states, then explicit overrides.

    A duplicate s^L takes the weight of s unless overridden itself.
    """
    favored = {s.original() for s in favored}
    overrides = dict(overrides or {})
    weights = {}
    for state in system.states():
        weight = favored_weight if state.original() in favored else default
        if state.original() in overrides:
            weight = overrides[state.original()]
        if state in overrides:
            weight = overrides[state]
        weights[state] = weight
    return TargetDistribution(weights)


class TransitionMatrix:
    """Row-stochastic matrix over the states of an abstraction, in declaration order."""

    def __init__(self, states: Iterable[AbstractState], matrix: np.ndarray):
        self._states = tuple(states)
        self._index = {s: i for i, s in enumerate(self._states)}
        self._matrix = np.array(matrix, dtype=float)
        self._matrix.setflags(write=False)
        self._cumulative = np.cumsum(self._matrix, axis=1)

    def states(self) -> tuple[AbstractState, ...]:
        return self._states

    def matrix(self) -> np.ndarray:
        return self._matrix

    def index_of(self, state: AbstractState) -> int:
        return self._index[state]

    def row(self, state: AbstractState) -> np.ndarray:
        return self._matrix[self._index[state]]

    def probability(self, source: AbstractState, target: AbstractState) -> float:
        return float(self._matrix[self._index[source], self._index[target]])

    def successor_index(self, index: int, draw: float) -> int:
        """Inverse-CDF lookup of a uniform draw in the row of `index`."""
        cumulative = self._cumulative[index]
        return min(int(np.searchsorted(cumulative, draw * cumulative[-1], side='right')), len(self._states) - 1)


def mh_matrix(system: AbstractTransitionSystem, target: TargetDistribution) -> TransitionMatrix:
    """
    Metropolis-Hastings matrix: p(s, s') = min(deg(s) pi(s') / (deg(s') pi(s)), 1) / deg(s) on edges,
    the remaining mass on the diagonal. deg is the out-degree of the self-loop-free relation.

    A single state without edges yields the 1x1 identity.

    Raises:
        AbstractionError: on self-loops, or a state without successors in a larger system.
    """
    states = system.states()
    if system.self_loops():
        raise AbstractionError(f"self-loops on {[str(s) for s in system.self_loops()]}; eliminate them first")
    if len(states) == 1 and system.out_degree(states[0]) == 0:
        return TransitionMatrix(states, np.ones((1, 1)))
    isolated = [str(s) for s in states if system.out_degree(s) == 0]
    if isolated:
        raise AbstractionError(f"states without successors: {isolated}")
    size = len(states)
    matrix = np.zeros((size, size))
    for i, s in enumerate(states):
        deg_s = system.out_degree(s)
        pi_s = target.probability(s)
        for t in system.successors(s):
            deg_t = system.out_degree(t)
            matrix[i, system.index_of(t)] = min(deg_s * target.probability(t) / (deg_t * pi_s), 1.0) / deg_s
        matrix[i, i] = 1.0 - matrix[i].sum()
    return TransitionMatrix(states, matrix)


def walk_step(matrix: TransitionMatrix, current: AbstractState, rng: np.random.Generator) -> AbstractState:
    index = matrix.successor_index(matrix.index_of(current), float(rng.random()))
    return matrix.states()[index]


def empirical_occupancy(matrix: TransitionMatrix, start: AbstractState, n_steps: int, rng: np.random.Generator) -> np.ndarray:
    """Visit frequencies of the n_steps states following `start` on one walk."""
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    counts = np.zeros(len(matrix.states()))
    index = matrix.index_of(start)
    draws = rng.random(n_steps)
    for draw in draws:
        index = matrix.successor_index(index, float(draw))
        counts[index] += 1
    return counts / n_steps


def stationary_distribution(matrix: TransitionMatrix) -> np.ndarray:
    """Left eigenvector of P for the eigenvalue closest to 1, normalized to sum 1."""
    values, vectors = scipy.linalg.eig(matrix.matrix().T)
    vector = np.real(vectors[:, int(np.argmin(np.abs(values - 1.0)))])
    return vector / vector.sum()


def expected_hitting_times(matrix: TransitionMatrix, targets: Iterable[AbstractState]) -> np.ndarray:
    """
    Expected number of walk steps to reach any target from each state (0 on targets,
    inf where no target is reachable).
    """
    targets = {matrix.index_of(s) for s in targets}
    if not targets:
        raise ValueError("no target state")
    p = matrix.matrix()
    graph = nx.DiGraph((int(i), int(j)) for i, j in zip(*np.nonzero(p)))
    graph.add_nodes_from(range(len(p)))
    graph.remove_edges_from([(i, j) for i, j in list(graph.edges()) if i in targets])
    reaching = set(targets)
    for target in targets:
        reaching |= nx.ancestors(graph, target)
    doomed = set(range(len(p))) - reaching
    for state in list(doomed):
        doomed |= nx.ancestors(graph, state)
    transient = sorted(set(range(len(p))) - targets - doomed)
    times = np.full(len(p), np.inf)
    times[list(targets)] = 0.0
    if transient:
        q = p[np.ix_(transient, transient)]
        times[transient] = scipy.linalg.solve(np.eye(len(transient)) - q, np.ones(len(transient)))
    return times
