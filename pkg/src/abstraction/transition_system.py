from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

import networkx as nx
import numpy as np
from scipy.optimize import linprog

from src.abstraction.predicate_map import PredicateMap, Valuation
from src.abstraction.regions import IntervalBox
from src.hybrid.automaton import HybridAutomaton, Transition
from src.hybrid.predicates import AffinePredicate, NamedPredicate, Relation
from src.hybrid.state import Trace


class AbstractionError(Exception):
    pass


class EdgeKind(Enum):
    CONTINUOUS = 'continuous'
    DISCRETE = 'discrete'


@dataclass(frozen=True)
class AbstractState:
    """A cell (q, b) of the abstraction; `duplicate` marks the copy made for a removed self-loop."""
    location: str
    valuation: Valuation
    duplicate: bool = False

    def original(self) -> AbstractState:
        return dataclasses.replace(self, duplicate=False)

    def copy(self) -> AbstractState:
        return dataclasses.replace(self, duplicate=True)

    @property
    def label(self) -> str:
        bits = ','.join('1' if b else '0' for b in self.valuation)
        return f"{self.location}({bits}){'^L' if self.duplicate else ''}"

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class UnknownEdge:
    source: AbstractState
    transition_id: int
    reason: str


class AbstractTransitionSystem:
    """
    Finite abstraction D = (S, ~>, s0). States keep declaration order; the relation is a
    networkx DiGraph whose edges carry the set of kinds (continuous and/or discrete).
    """

    def __init__(self, states: Sequence[AbstractState], edges: Mapping[tuple[AbstractState, AbstractState], Iterable[EdgeKind]],
                 initial: AbstractState, predicate_map: PredicateMap, unknown: Sequence[UnknownEdge] = ()):
        self._states = tuple(states)
        self._index = {state: i for i, state in enumerate(self._states)}
        if initial not in self._index:
            raise AbstractionError(f"initial state {initial} is not a state of the abstraction")
        self._graph = nx.DiGraph()
        self._graph.add_nodes_from(self._states)
        for source, target in edges:
            if source not in self._index or target not in self._index:
                raise AbstractionError(f"edge ({source}, {target}) leaves the state set")
        for (source, target), kinds in sorted(edges.items(), key=lambda item: (self._index[item[0][0]], self._index[item[0][1]])):
            self._graph.add_edge(source, target, kinds=frozenset(kinds))
        self._initial = initial
        self._predicate_map = predicate_map
        self._unknown = tuple(unknown)

    def states(self) -> tuple[AbstractState, ...]:
        return self._states

    def size(self) -> int:
        return len(self._states)

    def initial(self) -> AbstractState:
        return self._initial

    def predicate_map(self) -> PredicateMap:
        return self._predicate_map

    def graph(self) -> nx.DiGraph:
        return self._graph

    def index_of(self, state: AbstractState) -> int:
        return self._index[state]

    def has_state(self, state: AbstractState) -> bool:
        return state in self._index

    def edges(self) -> list[tuple[AbstractState, AbstractState]]:
        return sorted(self._graph.edges(), key=lambda e: (self._index[e[0]], self._index[e[1]]))

    def edge_kinds(self, source: AbstractState, target: AbstractState) -> frozenset:
        return self._graph.edges[source, target]['kinds']

    def edges_of_kind(self, kind: EdgeKind) -> list[tuple[AbstractState, AbstractState]]:
        return [e for e in self.edges() if kind in self.edge_kinds(*e)]

    def has_edge(self, source: AbstractState, target: AbstractState) -> bool:
        return self._graph.has_edge(source, target)

    def successors(self, state: AbstractState) -> list[AbstractState]:
        return sorted(self._graph.successors(state), key=self._index.get)

    def out_degree(self, state: AbstractState) -> int:
        return self._graph.out_degree(state)

    def self_loops(self) -> list[AbstractState]:
        return [s for s in self._states if self._graph.has_edge(s, s)]

    def unknown_edges(self) -> tuple[UnknownEdge, ...]:
        return self._unknown

    def states_of(self, location: str) -> list[AbstractState]:
        return [s for s in self._states if s.location == location]

    def abstract_state(self, location: str, x: np.ndarray) -> AbstractState:
        return AbstractState(location, self._predicate_map.alpha(location, x))

    def abstract_path(self, trace: Trace) -> list[AbstractState]:
        """Abstract states visited by the trace with consecutive repeats collapsed."""
        path = []
        for entry in trace:
            state = self.abstract_state(entry.state.location, entry.state.x)
            if not path or path[-1] != state:
                path.append(state)
        return path

    def is_path(self, states: Sequence[AbstractState]) -> bool:
        return all(self.has_edge(a, b) for a, b in zip(states, states[1:]))

    def __repr__(self):
        return f"AbstractTransitionSystem({len(self._states)} states, {self._graph.number_of_edges()} edges)"


def _affine_feasible(predicates: Sequence[AffinePredicate], box: IntervalBox) -> bool:
    """Feasibility of a conjunction of affine predicates over a box; strict rows keep a positive slack."""
    variables = sorted({i for p in predicates for i in p.support()})
    column = {index: j for j, index in enumerate(variables)}
    strict = any(p.relation() is Relation.GT for p in predicates)
    rows, rhs = [], []
    for p in predicates:
        row = np.zeros(len(variables) + 1)
        for index, a in p.coefficients().items():
            row[column[index]] = -a
        if p.relation() is Relation.GT:
            row[-1] = 1.0
        rows.append(row)
        rhs.append(p.constant())
    bounds = []
    for index in variables:
        interval = box.interval(index)
        bounds.append((None if np.isinf(interval.lo) else interval.lo, None if np.isinf(interval.hi) else interval.hi))
    bounds.append((None, 1.0) if strict else (0.0, 0.0))
    objective = np.zeros(len(variables) + 1)
    objective[-1] = -1.0
    result = linprog(objective, A_ub=np.array(rows), b_ub=np.array(rhs), bounds=bounds, method='highs')
    if result.status != 0:
        return False
    return not strict or -result.fun > 1e-12


def _symbolic_successors(automaton: HybridAutomaton, predicate_map: PredicateMap, transition: Transition,
                         cell: IntervalBox) -> Optional[list[Valuation]]:
    """Target cells by interval reasoning, or None when the guard or reset is not box-representable."""
    box = cell
    named, coupled = [], []
    for predicate in transition.guard.predicates + automaton.location(transition.source).invariant:
        if isinstance(predicate, AffinePredicate):
            if predicate.is_constant():
                if not predicate.holds(np.zeros(0)):
                    return []
            elif predicate.is_single_coordinate():
                box = box.restrict(predicate.support()[0], predicate.interval(True))
            else:
                coupled.append(predicate)
        elif isinstance(predicate, NamedPredicate):
            named.append(predicate)
        else:
            return None
    if box.is_empty():
        return []
    for predicate in named:
        satisfiable = predicate.satisfiable_on(box.intervals())
        if satisfiable is None:
            return None
        if not satisfiable:
            return []
    if coupled and not _affine_feasible(coupled, box):
        return []

    image = IntervalBox.everything()
    for index in predicate_map.support(transition.target):
        expression = transition.reset.expression_for(index)
        interval = box.interval(index) if expression is None else expression.image(box.intervals())
        if interval is None:
            return None
        image = image.restrict(index, interval)
    return [v for v in predicate_map.cells(transition.target)
            if not predicate_map.gamma(transition.target, v).intersect(image).is_empty()]


def _sampled_successors(automaton: HybridAutomaton, predicate_map: PredicateMap, transition: Transition,
                        valuation: Valuation, sampling_box, budget: int, rng: np.random.Generator) -> Optional[list[Valuation]]:
    """Target cells hit by reset images of sampled guard points; None when no sample satisfies the guard."""
    if sampling_box is None:
        raise AbstractionError(f"transition '{transition.name}' needs Monte-Carlo checks but no sampling box was given")
    lower, upper = sampling_box
    region = predicate_map.gamma(transition.source, valuation)
    base = region if isinstance(region, IntervalBox) else IntervalBox.everything()
    source = automaton.location(transition.source)
    hits = set()
    found = False
    for _ in range(budget):
        x = base.sample(rng, lower, upper)
        if x is None:
            break
        if not region.contains(x) or not source.invariant_holds(x) or not transition.guard.holds(x):
            continue
        found = True
        hits.add(predicate_map.alpha(transition.target, transition.reset.apply(x)))
    if not found:
        return None
    return [v for v in predicate_map.cells(transition.target) if v in hits]


def build_abstraction(automaton: HybridAutomaton, predicate_map: PredicateMap,
                      sampling_box: Optional[tuple[np.ndarray, np.ndarray]] = None, budget: int = 10000,
                      seed: int = 0, logger: Optional[logging.Logger] = None) -> AbstractTransitionSystem:
    """
    Build the abstraction of an automaton under a predicate map.

    Continuous edges join distinct cells of one location whose closures touch (interval cells)
    or whose valuations differ in one predicate (other cells). Discrete edges follow each
    transition from every source cell meeting its guard to every target cell meeting the
    reset image; interval reasoning is exact, other cases use `budget` uniform samples from
    `sampling_box`, and an edge with no satisfying sample is reported as unknown and left out.

    Raises:
        AbstractionError: if the initial state has no cell, or sampling is needed without a box.
    """
    logger = logger or logging.getLogger(__name__)
    rng = np.random.default_rng(seed)
    states = []
    cells = {}
    for location in automaton.location_names():
        cells[location] = predicate_map.cells(location)
        states += [AbstractState(location, v) for v in cells[location]]

    edges: dict[tuple[AbstractState, AbstractState], set] = {}

    def add(source, target, kind):
        edges.setdefault((source, target), set()).add(kind)

    for location in automaton.location_names():
        regions = [(v, predicate_map.gamma(location, v)) for v in cells[location]]
        for a, region_a in regions:
            for b, region_b in regions:
                if a == b:
                    continue
                if isinstance(region_a, IntervalBox) and isinstance(region_b, IntervalBox):
                    adjacent = region_a.adjacent_to(region_b)
                else:
                    adjacent = sum(x != y for x, y in zip(a, b)) == 1
                if adjacent:
                    add(AbstractState(location, a), AbstractState(location, b), EdgeKind.CONTINUOUS)

    unknown = []
    for transition in automaton.transitions():
        for valuation in cells[transition.source]:
            region = predicate_map.gamma(transition.source, valuation)
            targets = None
            if isinstance(region, IntervalBox) and predicate_map.is_interval_map(transition.target):
                targets = _symbolic_successors(automaton, predicate_map, transition, region)
            if targets is None:
                targets = _sampled_successors(automaton, predicate_map, transition, valuation, sampling_box, budget, rng)
            source = AbstractState(transition.source, valuation)
            if targets is None:
                unknown.append(UnknownEdge(source, transition.id, f"no sample of {budget} met the guard"))
                logger.warning(f"Abstraction edge from {source} via '{transition.name}' is unknown, left out")
                continue
            for target in targets:
                add(source, AbstractState(transition.target, target), EdgeKind.DISCRETE)

    initial_location = automaton.initial_location()
    initial = AbstractState(initial_location, predicate_map.alpha(initial_location, automaton.initial_state()))
    if initial not in states:
        raise AbstractionError(f"initial state maps to the empty cell {initial}")
    system = AbstractTransitionSystem(states, edges, initial, predicate_map, unknown)
    logger.info(f"Built abstraction of {automaton.name()}: {system.size()} states, {len(edges)} edges, {len(unknown)} unknown")
    return system


def eliminate_self_loops(system: AbstractTransitionSystem) -> AbstractTransitionSystem:
    """Replace each self-loop (s, s) by s -> s^L -> s with a fresh copy s^L listed right after s."""
    loops = set(system.self_loops())
    if not loops:
        return system
    states = []
    for state in system.states():
        states.append(state)
        if state in loops:
            states.append(state.copy())
    edges = {}
    for source, target in system.edges():
        kinds = system.edge_kinds(source, target)
        if source == target:
            edges[(source, source.copy())] = kinds
            edges[(source.copy(), source)] = kinds
        else:
            edges[(source, target)] = kinds
    return AbstractTransitionSystem(states, edges, system.initial(), system.predicate_map(), system.unknown_edges())
