import numpy as np
import pytest

from src.abstraction.metropolis import mh_matrix, target_distribution, violation_states
from src.abstraction.transition_system import eliminate_self_loops
from src.explorer.config import ExplorerConfig, ExplorerConfigError, GoalBias, InputMode, TransitionTiming
from src.explorer.distance import HybridMetric, hybrid_distance, nearest_neighbor
from src.explorer.goal_sampler import AbstractionGoalSampler, BoxGoalSampler
from src.explorer.guided_explorer import GuidedExplorer, falsify
from src.explorer.tree import ExplorationTree
from src.hybrid.automaton import HybridAutomaton, Location
from src.hybrid.executor import replay
from src.hybrid.predicates import AffinePredicate
from src.hybrid.state import ContinuousStep, DiscreteJump, HybridState
from src.properties.oscillation import INIT, LRN, OSC
from src.properties.verdict import VerdictKind


@pytest.fixture
def hopf_walk(hopf_abstraction, hopf_spec):
    system = eliminate_self_loops(hopf_abstraction)
    target = target_distribution(system, 0.1, violation_states(system, OSC, INIT), 0.25)
    return system, mh_matrix(system, target)


def run_hopf(hopf_automaton, hopf_spec, hopf_walk, hopf_bounds, **overrides):
    system, matrix = hopf_walk
    config = ExplorerConfig(**{'n_iterations': 150, 'h': hopf_spec.h, 'seed': 4, **overrides})
    report, _ = falsify(hopf_automaton, hopf_spec, system, matrix, config, hopf_bounds)
    return report


class TestExplorerConfig:
    def test_round_trip(self):
        config = ExplorerConfig(n_iterations=10, h=0.01, input_mode=InputMode.GRID, grid_resolution=5,
                                distance_coordinates=(0, 1), distance_weights=(1.0, 2.0), location_penalty=3.0,
                                seed=9, walk_steps=2, transition_timing=TransitionTiming.STEER,
                                goal_bias=GoalBias.BOX, stop_on_falsification=False)
        assert ExplorerConfig.from_dict(config.to_dict()) == config
        assert ExplorerConfig.from_dict({}) == ExplorerConfig()

    @pytest.mark.parametrize('kwargs', [
        {'n_iterations': 0},
        {'h': 0.0},
        {'n_inputs': 0},
        {'location_penalty': -1.0},
        {'distance_weights': (1.0,)},
        {'distance_coordinates': (0,), 'distance_weights': (-1.0,)},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ExplorerConfigError):
            ExplorerConfig(**kwargs)

    def test_unknown_enum_value(self):
        with pytest.raises(ValueError):
            ExplorerConfig.from_dict({'input_mode': 'spiral'})


class TestTreeAndDistance:
    def test_tree_growth_and_paths(self):
        tree = ExplorationTree(HybridState('A', np.zeros(2)))
        parent = 0
        for i in range(100):
            parent = tree.add(HybridState('A', np.array([i + 1.0, 0.0]), i + 1, 0.1), parent, ContinuousStep(np.zeros(0), 0.1))
        tree.mark_exhausted(3)
        branch = tree.add(HybridState('B', np.zeros(2)), 1, DiscreteJump(0, 'A', 'B'))
        assert len(tree) == 102
        assert tree.points().shape == (102, 2)
        assert tree.points()[100, 0] == 100.0
        assert tree.is_exhausted(3) and not tree.is_exhausted(4)
        assert tree.deepest() == 100
        assert tree.path(branch) == [0, 1, branch]
        assert tree.is_jump(branch)
        assert tree.trace_to(branch).location_sequence() == ['A', 'A', 'B']

    def test_unknown_parent(self):
        tree = ExplorationTree(HybridState('A', np.zeros(1)))
        with pytest.raises(IndexError):
            tree.add(HybridState('A', np.zeros(1)), 5, DiscreteJump(0))

    def test_nearest_neighbor(self):
        tree = ExplorationTree(HybridState('A', np.array([0.0, 0.0])))
        tree.add(HybridState('A', np.array([2.0, 0.0])), 0, DiscreteJump(0))
        tree.add(HybridState('B', np.array([5.0, 0.0])), 0, DiscreteJump(0))
        metric = HybridMetric.uniform((0, 1), penalty=10.0)
        assert nearest_neighbor(tree, HybridState('A', np.array([1.0, 0.0])), metric) == 0
        assert nearest_neighbor(tree, HybridState('B', np.array([1.0, 0.0])), metric) == 2
        assert nearest_neighbor(tree, HybridState('C', np.array([4.9, 0.0])), metric) == 2
        for i in range(3):
            tree.mark_exhausted(i)
        assert nearest_neighbor(tree, HybridState('A', np.zeros(2)), metric) == -1

    def test_nearest_neighbor_matches_an_exhaustive_scan(self, rng):
        tree = ExplorationTree(HybridState('A', rng.uniform(-1.0, 1.0, 3)))
        for _ in range(999):
            location = 'A' if rng.random() < 0.5 else 'B'
            tree.add(HybridState(location, rng.uniform(-1.0, 1.0, 3)), int(rng.integers(len(tree))), DiscreteJump(0))
        exhausted = set(int(i) for i in rng.choice(len(tree), size=100, replace=False))
        for i in exhausted:
            tree.mark_exhausted(i)
        metric = HybridMetric((0, 1, 2), (1.0, 2.0, 0.5), 0.3)
        for location in ('A', 'B', 'C') * 20:
            goal = HybridState(location, rng.uniform(-1.2, 1.2, 3))
            scan = min(range(len(tree)), key=lambda i: hybrid_distance(goal, tree.state(i), metric))
            assert nearest_neighbor(tree, goal, metric, skip_exhausted=False) == scan
            live = [i for i in range(len(tree)) if i not in exhausted]
            scan = min(live, key=lambda i: hybrid_distance(goal, tree.state(i), metric))
            assert nearest_neighbor(tree, goal, metric) == scan

    def test_hybrid_distance(self):
        metric = HybridMetric((0, 1), (1.0, 4.0), 7.0)
        a, b = HybridState('A', np.array([0.0, 0.0])), HybridState('B', np.array([3.0, 2.0]))
        assert hybrid_distance(a, b, metric) == pytest.approx(5.0 + 7.0)
        assert HybridMetric.box_diameter((0, 1), (1.0, 1.0), np.zeros(2), np.array([3.0, 4.0])) == 5.0


class TestGoalSamplers:
    def test_box_goals(self, rng):
        sampler = BoxGoalSampler(('A', 'B'), np.zeros(2), np.ones(2), record=True)
        goals = [sampler.sample_goal(rng) for _ in range(50)]
        assert all(g.location in ('A', 'B') and np.all((g.x >= 0.0) & (g.x <= 1.0)) for g in goals)
        assert sum(sampler.goal_counts().values()) == 50
        assert len(sampler.goal_log()) == 50

    def test_abstraction_goals_lie_in_their_cells(self, ll_system, ll_matrix, ll_bounds, rng):
        sampler = AbstractionGoalSampler(ll_system, ll_matrix, *ll_bounds, record=True)
        predicate_map = ll_system.predicate_map()
        for _ in range(200):
            goal = sampler.sample_goal(rng)
            state = sampler.current()
            assert goal.location == state.location
            assert predicate_map.gamma(state.location, state.valuation).contains(goal.x)
            assert np.all(goal.x >= ll_bounds[0]) and np.all(goal.x <= ll_bounds[1])
        assert sampler.empty_cell_warnings() == 0
        assert [row[0] for row in sampler.goal_log()] == list(range(200))

    def test_pinned_walk_moves_along_edges(self, ll_system, ll_matrix, ll_bounds, rng):
        sampler = AbstractionGoalSampler(ll_system, ll_matrix, *ll_bounds)
        start = ll_system.states()[4]
        sampler.pin(start)
        sampler.sample_goal(rng)
        assert sampler.current() == start or ll_system.has_edge(start, sampler.current())

    def test_favoring_biases_goals(self, ll_system, ll_bounds):
        favored = violation_states(ll_system, OSC, INIT)
        labels = {s.label for s in favored}

        def favored_share(matrix):
            sampler = AbstractionGoalSampler(ll_system, matrix, *ll_bounds)
            rng = np.random.default_rng(21)
            for _ in range(40000):
                sampler.sample_goal(rng)
            counts = sampler.goal_counts()
            return sum(counts.get(label, 0) for label in labels) / 40000

        biased = favored_share(mh_matrix(ll_system, target_distribution(ll_system, 0.1, favored, 0.25)))
        uniform = favored_share(mh_matrix(ll_system, target_distribution(ll_system, 0.1)))
        assert biased == pytest.approx(0.5 / 4.1, abs=0.025)
        assert uniform == pytest.approx(0.4 / 4.2, abs=0.025)
        assert biased > uniform


class TestGuidedExplorer:
    def test_forced_jump_follows_the_committed_step(self, hopf_automaton, hopf_spec, hopf_bounds, rng):
        config = ExplorerConfig(n_iterations=1, h=hopf_spec.h)
        sampler = BoxGoalSampler(hopf_automaton.location_names(), *hopf_bounds)
        explorer = GuidedExplorer(hopf_automaton, hopf_spec, config, sampler, hopf_bounds)
        x = hopf_automaton.initial_state().copy()
        x[3] = 0.45
        tree = ExplorationTree(HybridState(INIT, x))
        added = explorer.extend(tree, 0, HybridState(INIT, x.copy()), rng)
        assert added == [1, 2]
        assert isinstance(tree.node(1).action, ContinuousStep)
        assert tree.node(2).action == DiscreteJump(0, INIT, LRN)
        assert tree.state(2).location == LRN
        assert tree.state(2).x[3] == 0.0

    def test_default_metric(self, hopf_automaton, hopf_spec, hopf_bounds):
        sampler = BoxGoalSampler(hopf_automaton.location_names(), *hopf_bounds)
        explorer = GuidedExplorer(hopf_automaton, hopf_spec, ExplorerConfig(h=hopf_spec.h), sampler, hopf_bounds)
        metric = explorer.metric()
        assert metric.coordinates == (0, 1, 5, 6)
        assert metric.penalty == pytest.approx(np.sqrt(2 * 4.0 ** 2 + 2 * 8.0 ** 2))

    def test_node_without_actions_is_exhausted(self, hopf_spec, rng):
        location = Location('A', lambda y, u: np.ones(1), (AffinePredicate.at_most(0, 0.01),))
        automaton = HybridAutomaton('stuck', [location], [], 'A', np.zeros(1))
        config = ExplorerConfig(n_iterations=3, h=0.05, distance_coordinates=(0,), location_penalty=1.0)
        bounds = (np.zeros(1), np.ones(1))
        explorer = GuidedExplorer(automaton, hopf_spec, config, BoxGoalSampler(('A',), *bounds), bounds)
        tree = ExplorationTree(automaton.initial_hybrid_state())
        assert explorer.extend(tree, 0, HybridState('A', np.ones(1)), rng) == []
        assert tree.is_exhausted(0)

    def test_runs_are_deterministic(self, hopf_automaton, hopf_spec, hopf_walk, hopf_bounds):
        first = run_hopf(hopf_automaton, hopf_spec, hopf_walk, hopf_bounds)
        second = run_hopf(hopf_automaton, hopf_spec, hopf_walk, hopf_bounds)
        assert first.to_json() == second.to_json()
        assert 'elapsed_seconds' in first.timing() and 'elapsed' not in first.to_dict()

    def test_witness_replays(self, hopf_automaton, hopf_spec, hopf_walk, hopf_bounds):
        report = run_hopf(hopf_automaton, hopf_spec, hopf_walk, hopf_bounds, stop_on_falsification=False)
        replayed = replay(hopf_automaton, report.witness)
        assert replayed.final_state().same_as(report.witness_trace.final_state())
        assert len(report.witness) == len(report.witness_trace) - 1

    def test_report_contents(self, hopf_automaton, hopf_spec, hopf_walk, hopf_bounds):
        system, _ = hopf_walk
        report = run_hopf(hopf_automaton, hopf_spec, hopf_walk, hopf_bounds, goal_bias=GoalBias.BOX)
        assert report.iterations <= 150
        assert report.tree_size >= 2
        assert report.coverage.total == system.size()
        assert 0 < report.coverage.visited <= system.size()
        assert report.verdict.kind in set(VerdictKind)
        assert set(report.goal_counts) <= set(hopf_automaton.location_names())
        assert report.config['seed'] == 4
