import logging
import time
from collections import Counter
from typing import Optional

import numpy as np

from src.abstraction.metropolis import TransitionMatrix
from src.abstraction.transition_system import AbstractTransitionSystem
from src.explorer.config import ExplorerConfig, GoalBias, InputMode, TransitionTiming
from src.explorer.distance import HybridMetric, hybrid_distance, nearest_neighbor
from src.explorer.goal_sampler import AbstractionGoalSampler, BoxGoalSampler
from src.explorer.report import Coverage, FalsificationReport
from src.explorer.tree import ExplorationTree
from src.hybrid.automaton import HybridAutomaton
from src.hybrid.errors import HybridError
from src.hybrid.executor import continuous_step, enabled_transitions, forced_transitions, take_transition
from src.hybrid.state import ContinuousStep, DiscreteJump, HybridState
from src.interfaces.IGoalSampler import IGoalSampler
from src.properties.layout import MemoryForm, OscillationLayout
from src.properties.oscillation import INIT, OSC, STD
from src.properties.specs import OscillationSpec
from src.properties.verdict import Verdict, VerdictKind, classify_trace


def coverage_estimate(tree: ExplorationTree, system: AbstractTransitionSystem) -> Coverage:
    """Tree nodes per abstract state and the fraction of abstract states visited."""
    counts = Counter()
    for index in range(len(tree)):
        state = tree.state(index)
        counts[system.abstract_state(state.location, state.x).label] += 1
    labels = [s.label for s in system.states()]
    ordered = {label: counts.get(label, 0) for label in labels}
    visited = sum(1 for label in labels if counts.get(label, 0) > 0)
    return Coverage(ordered, visited, len(labels))


class GuidedExplorer:
    """
    Tree-based falsification of an oscillation property automaton.

    Every iteration samples a goal, picks the nearest tree node and commits the candidate action
    whose successor lands closest to the goal. Candidates are the forced transitions of the node
    when there are any, otherwise the sampled inputs (and, in steer mode, the enabled optional
    transitions). Forced transitions at a new node are fired right away, like `simulate` does.

    Args:
        automaton (HybridAutomaton): Oscillation property automaton.
        spec (OscillationSpec): Its property parameters.
        config (ExplorerConfig): Exploration settings.
        goal_sampler (IGoalSampler): Goal source.
        bounds (tuple[np.ndarray, np.ndarray]): Bounding box of the automaton state.
        form (MemoryForm): Memory form of the automaton.
        system (AbstractTransitionSystem, optional): Abstraction used for coverage statistics.
        logger (logging.Logger, optional): Logger instance.
    """

    def __init__(self, automaton: HybridAutomaton, spec: OscillationSpec, config: ExplorerConfig, goal_sampler: IGoalSampler,
                 bounds: tuple[np.ndarray, np.ndarray], form: MemoryForm = MemoryForm.DIFFERENCE,
                 system: Optional[AbstractTransitionSystem] = None, logger: Optional[logging.Logger] = None):
        self._automaton = automaton
        self._spec = spec
        self._config = config
        self._sampler = goal_sampler
        self._form = form
        self._layout = OscillationLayout.from_spec(spec, form)
        self._system = system
        self._logger = logger or logging.getLogger(__name__)
        coordinates = config.distance_coordinates
        if coordinates is None:
            coordinates = spec.monitored + self._layout.memory_of(spec.monitored)
        weights = config.distance_weights or (1.0,) * len(coordinates)
        penalty = config.location_penalty
        if penalty is None:
            penalty = HybridMetric.box_diameter(coordinates, weights, bounds[0], bounds[1])
        self._metric = HybridMetric(tuple(coordinates), tuple(weights), float(penalty))

    def metric(self) -> HybridMetric:
        return self._metric

    def _inputs(self, state: HybridState, rng: np.random.Generator) -> np.ndarray:
        location = self._automaton.location(state.location)
        if self._config.input_mode is InputMode.GRID:
            inputs = location.input_box.grid(self._config.grid_resolution)
        else:
            inputs = location.input_box.sample_uniform(rng, self._config.n_inputs)
        saturated = [location.saturate(state.x, u, self._config.h) for u in inputs]
        return np.array(saturated, dtype=float).reshape(inputs.shape)

    def _candidates(self, state: HybridState, rng: np.random.Generator) -> list:
        candidates = []
        forced = forced_transitions(self._automaton, state)
        if forced:
            transition_ids = forced
        else:
            for u in self._inputs(state, rng):
                try:
                    candidates.append((ContinuousStep(u, self._config.h),
                                       continuous_step(self._automaton, state, u, self._config.h)))
                except HybridError as e:
                    self._logger.debug(f"Input {u} rejected at t={state.t:g}: {e}")
            transition_ids = []
            if self._config.transition_timing is TransitionTiming.STEER:
                transition_ids = enabled_transitions(self._automaton, state)
        for transition_id in transition_ids:
            transition = self._automaton.transition(transition_id)
            try:
                successor = take_transition(self._automaton, state, transition_id)
            except HybridError as e:
                self._logger.debug(f"Transition '{transition.name}' rejected at t={state.t:g}: {e}")
                continue
            candidates.append((DiscreteJump(transition_id, transition.source, transition.target), successor))
        return candidates

    def _fire_forced(self, tree: ExplorationTree, index: int) -> list[int]:
        added = []
        for _ in range(len(self._automaton.transitions()) + 1):
            state = tree.state(index)
            forced = forced_transitions(self._automaton, state)
            if not forced:
                return added
            transition = self._automaton.transition(forced[0])
            try:
                successor = take_transition(self._automaton, state, forced[0])
            except HybridError as e:
                self._logger.warning(f"Forced transition '{transition.name}' failed at t={state.t:g}: {e}")
                tree.mark_exhausted(index)
                return added
            index = tree.add(successor, index, DiscreteJump(forced[0], transition.source, transition.target))
            added.append(index)
        self._logger.warning(f"Too many jumps at one instant from node {index}")
        tree.mark_exhausted(index)
        return added

    def extend(self, tree: ExplorationTree, node: int, goal: HybridState, rng: np.random.Generator) -> list[int]:
        """
        Commit the best candidate action at `node` and fire the forced transitions that follow.

        Returns:
            list[int]: Indices of the appended nodes, the committed action first; empty when the
            node is exhausted (no candidate action is executable).
        """
        state = tree.state(node)
        best = None
        best_distance = np.inf
        for action, successor in self._candidates(state, rng):
            distance = hybrid_distance(successor, goal, self._metric)
            if distance < best_distance:
                best, best_distance = (action, successor), distance
        if best is None:
            tree.mark_exhausted(node)
            self._logger.warning(f"Node {node} at t={state.t:g} in {state.location} has no executable action")
            return []
        index = tree.add(best[1], node, best[0])
        return [index] + self._fire_forced(tree, index)

    def _is_exit_jump(self, tree: ExplorationTree, index: int) -> bool:
        action = tree.node(index).action
        return isinstance(action, DiscreteJump) and action.target == INIT and action.source in (OSC, STD)

    def _max_deviation(self, tree: ExplorationTree, index: int) -> float:
        deviations = [np.max(np.abs(self._layout.deviation(tree.state(i).x, self._spec.monitored))) for i in tree.path(index)]
        return float(max(deviations))

    def falsify(self) -> FalsificationReport:
        """
        Grow the tree for `n_iterations` rounds or until a path ends with a falsifying jump.

        Without a falsification the verdict is the classification of the deepest path when it is
        Oscillating or Steady, and Inconclusive otherwise.
        """
        config = self._config
        rng = np.random.default_rng(config.seed)
        tree = ExplorationTree(self._automaton.initial_hybrid_state())
        started = time.perf_counter()
        falsified: Optional[tuple[int, Verdict]] = None
        iterations = 0
        for iteration in range(config.n_iterations):
            iterations = iteration + 1
            goal = self._sampler.sample_goal(rng)
            near = nearest_neighbor(tree, goal, self._metric)
            if near < 0:
                self._logger.warning(f"Every tree node is exhausted after {iteration} iterations")
                break
            for index in self.extend(tree, near, goal, rng):
                if falsified is None and self._is_exit_jump(tree, index):
                    verdict = classify_trace(tree.trace_to(index), self._spec, self._form)
                    if verdict.is_falsified():
                        falsified = (index, verdict)
                        self._logger.info(f"Falsified at iteration {iteration}: t={verdict.witness_time:g}, "
                                          f"exit value {verdict.exit_value:g}, tree size {len(tree)}")
            if falsified is not None and config.stop_on_falsification:
                break
            if iteration and iteration % 5000 == 0:
                self._logger.debug(f"Iteration {iteration}: {len(tree)} nodes")

        if falsified is not None:
            witness_node, verdict = falsified
        else:
            witness_node = tree.deepest()
            verdict = classify_trace(tree.trace_to(witness_node), self._spec, self._form)
            if verdict.kind not in (VerdictKind.OSCILLATING, VerdictKind.STEADY):
                verdict = Verdict(VerdictKind.INCONCLUSIVE, verdict.period, cycles=verdict.cycles)
        elapsed = time.perf_counter() - started
        coverage = coverage_estimate(tree, self._system) if self._system is not None else Coverage({}, 0, 0)
        self._logger.info(f"Exploration with seed {config.seed} finished: {verdict.kind.value}, "
                          f"{len(tree)} nodes, {elapsed:.2f} s")
        return FalsificationReport(
            verdict=verdict,
            witness=tree.actions_to(witness_node),
            witness_node=witness_node,
            tree_size=len(tree),
            iterations=iterations,
            coverage=coverage,
            goal_counts=self._sampler.goal_counts(),
            empty_cell_warnings=self._sampler.empty_cell_warnings(),
            exhausted_nodes=int(np.count_nonzero(tree.exhausted_mask())),
            max_deviation=self._max_deviation(tree, witness_node),
            seed=config.seed,
            config=config.to_dict(),
            elapsed=elapsed,
            witness_trace=tree.trace_to(witness_node),
        )


def make_goal_sampler(automaton: HybridAutomaton, config: ExplorerConfig, system: AbstractTransitionSystem,
                      matrix: TransitionMatrix, bounds: tuple[np.ndarray, np.ndarray], record: bool = False,
                      logger: Optional[logging.Logger] = None) -> IGoalSampler:
    if config.goal_bias is GoalBias.BOX:
        return BoxGoalSampler(automaton.location_names(), bounds[0], bounds[1], record)
    return AbstractionGoalSampler(system, matrix, bounds[0], bounds[1], config.walk_steps, record, logger)


def falsify(automaton: HybridAutomaton, spec: OscillationSpec, system: AbstractTransitionSystem, matrix: TransitionMatrix,
            config: ExplorerConfig, bounds: tuple[np.ndarray, np.ndarray], form: MemoryForm = MemoryForm.DIFFERENCE,
            record_goals: bool = False, logger: Optional[logging.Logger] = None) -> tuple[FalsificationReport, IGoalSampler]:
    """Run one guided exploration and return its report with the goal sampler used (for goal logs)."""
    sampler = make_goal_sampler(automaton, config, system, matrix, bounds, record_goals, logger)
    explorer = GuidedExplorer(automaton, spec, config, sampler, bounds, form, system, logger)
    return explorer.falsify(), sampler
