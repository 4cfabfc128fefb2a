import numpy as np
import pytest

from src.abstraction.metropolis import (TargetDistribution, TransitionMatrix, empirical_occupancy,
                                        expected_hitting_times, mh_matrix, stationary_distribution,
                                        target_distribution, violation_states, walk_step)
from src.abstraction.predicate_map import PredicateMap
from src.abstraction.transition_system import AbstractionError, AbstractState, AbstractTransitionSystem, EdgeKind
from src.properties.oscillation import INIT, OSC

# Laub-Loomis abstraction after self-loop elimination, in state order
I, L, S, SL, A, B, BL, C = range(8)


def toy_states(count):
    return [AbstractState('Q', (i,)) for i in range(count)]


def toy_system(count, pairs):
    states = toy_states(count)
    edges = {(states[i], states[j]): {EdgeKind.CONTINUOUS} for i, j in pairs}
    return AbstractTransitionSystem(states, edges, states[0], PredicateMap({}))


def symmetric(pairs):
    return pairs + [(j, i) for i, j in pairs]


class TestMetropolisMatrix:
    def test_laub_loomis_probabilities(self, ll_matrix):
        p = ll_matrix.matrix()
        expected = {
            (I, L): 0.5, (I, I): 0.5,
            (L, S): 0.5, (L, B): 1 / 3, (L, L): 1 / 6,
            (S, SL): 0.5, (S, I): 0.5, (S, S): 0.0,
            (SL, S): 0.5, (SL, SL): 0.5,
            (A, I): 0.4, (A, B): 2 / 15, (A, A): 7 / 15,
            (C, I): 0.4, (C, B): 2 / 15, (C, C): 7 / 15,
            (B, A): 1 / 3, (B, C): 1 / 3, (B, BL): 1 / 3, (B, B): 0.0,
            (BL, B): 1 / 3, (BL, BL): 2 / 3,
        }
        for (i, j), value in expected.items():
            assert p[i, j] == pytest.approx(value, abs=1e-12), (i, j)
        assert np.count_nonzero(p > 1e-12) == sum(1 for v in expected.values() if v > 0)

    def test_rows_are_stochastic(self, ll_matrix):
        assert np.allclose(ll_matrix.matrix().sum(axis=1), 1.0)
        assert np.all(ll_matrix.matrix() >= 0.0)

    def test_violation_states(self, ll_system):
        assert [s.label for s in violation_states(ll_system, OSC, INIT)] == ['OSC(1,0,1,0)', 'OSC(0,1,0,1)']

    def test_duplicates_inherit_weights(self, ll_system, ll_target):
        states = ll_system.states()
        assert ll_target.weight(states[BL]) == ll_target.weight(states[B]) == 0.1
        assert ll_target.weight(states[A]) == 0.25

    def test_overrides_win(self, ll_system):
        states = ll_system.states()
        target = target_distribution(ll_system, 0.1, [states[A]], 0.25, {states[B]: 0.5, states[BL]: 0.2})
        assert target.weight(states[B]) == 0.5
        assert target.weight(states[BL]) == 0.2
        assert target.weight(states[A]) == 0.25

    def test_detailed_balance_on_a_symmetric_relation(self):
        system = toy_system(4, symmetric([(0, 1), (1, 2), (2, 3), (0, 2)]))
        weights = dict(zip(system.states(), [0.1, 0.4, 0.2, 0.3]))
        target = TargetDistribution(weights)
        p = mh_matrix(system, target).matrix()
        pi = target.vector(system.states())
        flow = pi[:, None] * p
        assert np.allclose(flow, flow.T)
        assert np.allclose(stationary_distribution(mh_matrix(system, target)), pi)

    def test_two_state_cycle(self):
        system = toy_system(2, [(0, 1), (1, 0)])
        matrix = mh_matrix(system, TargetDistribution(dict.fromkeys(system.states(), 1.0)))
        assert matrix.matrix().tolist() == [[0.0, 1.0], [1.0, 0.0]]
        assert np.allclose(stationary_distribution(matrix), [0.5, 0.5])
        assert expected_hitting_times(matrix, [system.states()[1]]).tolist() == [1.0, 0.0]

    def test_single_state(self):
        system = toy_system(1, [])
        matrix = mh_matrix(system, TargetDistribution({system.initial(): 1.0}))
        assert matrix.matrix().tolist() == [[1.0]]

    def test_isolated_state_rejected(self):
        system = toy_system(3, [(0, 1), (1, 0)])
        with pytest.raises(AbstractionError):
            mh_matrix(system, TargetDistribution(dict.fromkeys(system.states(), 1.0)))

    def test_self_loop_rejected(self, ll_abstraction):
        with pytest.raises(AbstractionError):
            mh_matrix(ll_abstraction, TargetDistribution(dict.fromkeys(ll_abstraction.states(), 1.0)))

    def test_non_positive_weight_rejected(self):
        with pytest.raises(AbstractionError):
            TargetDistribution(dict(zip(toy_states(2), [1.0, 0.0])))


class TestStationaryBehavior:
    def test_favored_distribution(self, ll_matrix):
        pi = stationary_distribution(ll_matrix)
        expected = np.array([1.0, 0.6, 0.6, 0.6, 0.25, 0.4, 0.4, 0.25]) / 4.1
        assert np.allclose(pi, expected, atol=1e-9)

    def test_favoring_raises_violation_mass(self, ll_system, ll_matrix):
        uniform = mh_matrix(ll_system, target_distribution(ll_system, 0.1))
        pi_uniform = stationary_distribution(uniform)
        assert np.allclose(pi_uniform, np.array([1.0, 0.6, 0.6, 0.6, 0.2, 0.5, 0.5, 0.2]) / 4.2, atol=1e-9)
        favored_mass = stationary_distribution(ll_matrix)[[A, C]].sum()
        assert favored_mass == pytest.approx(0.5 / 4.1)
        assert favored_mass > pi_uniform[[A, C]].sum()

    def test_occupancy_approaches_the_stationary_distribution(self, ll_system, ll_matrix):
        occupancy = empirical_occupancy(ll_matrix, ll_system.initial(), 100000, np.random.default_rng(5))
        assert np.allclose(occupancy, stationary_distribution(ll_matrix), atol=0.02)

    def test_walk_follows_edges(self, ll_system, ll_matrix, rng):
        state = ll_system.initial()
        for _ in range(500):
            successor = walk_step(ll_matrix, state, rng)
            assert successor == state or ll_system.has_edge(state, successor)
            state = successor

    def test_occupancy_needs_steps(self, ll_system, ll_matrix, rng):
        with pytest.raises(ValueError):
            empirical_occupancy(ll_matrix, ll_system.initial(), 0, rng)


class TestHittingTimes:
    def test_absorbing_pair(self):
        states = toy_states(2)
        matrix = TransitionMatrix(states, np.array([[0.5, 0.5], [0.0, 1.0]]))
        assert expected_hitting_times(matrix, [states[1]]).tolist() == [2.0, 0.0]

    def test_states_that_may_never_arrive(self):
        states = toy_states(3)
        matrix = TransitionMatrix(states, np.array([[0.5, 0.25, 0.25], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))
        times = expected_hitting_times(matrix, [states[2]])
        assert np.isinf(times[0]) and np.isinf(times[1])
        assert times[2] == 0.0

    def test_laub_loomis_violation_is_reachable(self, ll_system, ll_matrix):
        times = expected_hitting_times(ll_matrix, violation_states(ll_system, OSC, INIT))
        assert times[A] == times[C] == 0.0
        assert np.all(np.isfinite(times))
        assert np.all(times[[I, L, S, SL, B, BL]] > 0.0)

    def test_requires_a_target(self, ll_matrix):
        with pytest.raises(ValueError):
            expected_hitting_times(ll_matrix, [])
