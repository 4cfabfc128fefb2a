import dataclasses
import math

import numpy as np
import pytest

from src.hybrid.executor import simulate
from src.hybrid.policies import NeverJumpPolicy
from src.models.catalog import PLANT_FACTORIES, get_plant, synthetic_plants
from src.models.laub_loomis import LaubLoomisParams, laub_loomis_dynamics, laub_loomis_plant
from src.models.plant import (PlantError, augment_with_parameters, build_plant_automaton, calibrate_initial_state)
from src.models.synthetic import contracting_plant, harmonic_plant, hopf_plant

# Each rate k_i (0-based) times a product of concentrations, with its sign, per derivative.
LAUB_LOOMIS_MONOMIALS = [
    [(1, 0, (6,)), (-1, 1, (0, 1))],
    [(1, 2, (4,)), (-1, 3, (1,))],
    [(1, 4, (6,)), (-1, 5, (1, 2))],
    [(1, 6, ()), (-1, 7, (2, 3))],
    [(1, 8, (0,)), (-1, 9, (3, 4))],
    [(1, 10, (0,)), (-1, 11, (5,))],
    [(1, 12, (5,)), (-1, 13, (6,))],
]


class TestLaubLoomis:
    def test_right_hand_side_at_ones(self):
        dx = laub_loomis_dynamics(np.ones(7), LaubLoomisParams().as_array())
        assert dx == pytest.approx([1.1, 1.0, -0.2, -0.3, -0.5, -4.2, 18.5])

    @pytest.mark.parametrize('n_points', [2000, pytest.param(100000, marks=pytest.mark.slow)])
    def test_right_hand_side_matches_a_monomial_table(self, n_points):
        rng = np.random.default_rng(21)
        x = rng.uniform(0.0, 5.0, size=(n_points, 7))
        k = rng.uniform(0.1, 25.0, size=(n_points, 14))
        expected = np.zeros((n_points, 7))
        for i, terms in enumerate(LAUB_LOOMIS_MONOMIALS):
            for sign, rate, variables in terms:
                term = k[:, rate]
                for v in variables:
                    term = term * x[:, v]
                expected[:, i] += sign * term
        actual = np.array([laub_loomis_dynamics(x[j], k[j]) for j in range(n_points)])
        assert actual == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_nominal_trajectory_stays_bounded(self):
        plant = laub_loomis_plant()
        trace = simulate(build_plant_automaton(plant), None, NeverJumpPolicy(), 4000, 0.05)
        states = np.array([state.x for state in trace.states()])
        assert trace.final_state().t == pytest.approx(200.0)
        assert np.all(np.isfinite(states))
        assert np.max(np.abs(states)) < 1e4

    def test_plant_metadata(self):
        plant = laub_loomis_plant()
        assert plant.dimension == 7
        assert plant.variable_names[0] == 'ACA'
        assert plant.parameter_names[0] == 'k1'
        assert plant.parameter_units[5] == 'min^-1 uM^-1'
        assert plant.bounds()[1].tolist() == [5.0] * 7

    @pytest.mark.parametrize('k', [(1.0,) * 13, (1.0,) * 13 + (-1.0,)])
    def test_invalid_parameters(self, k):
        with pytest.raises(PlantError):
            LaubLoomisParams(k)

    def test_wrong_dimension(self):
        with pytest.raises(PlantError):
            laub_loomis_dynamics(np.ones(6), LaubLoomisParams().as_array())


class TestParameterAugmentation:
    def test_varied_parameter_becomes_state(self, ll_plant):
        assert ll_plant.param_dim() == 1
        assert ll_plant.state_dimension() == 8
        assert ll_plant.varied_names() == ('k1',)
        y = np.concatenate([np.ones(7), [2.2]])
        dy = ll_plant.vector_field(y, np.array([0.05]))
        assert dy[0] == pytest.approx(2.2 - 0.9)
        assert dy[7] == 0.05

    def test_invariant_and_saturation(self, ll_plant):
        invariant = ll_plant.parameter_invariant(7)
        y = np.concatenate([np.ones(7), [2.2]])
        assert all(p.holds(y) for p in invariant)
        y[7] = 2.3
        assert not all(p.holds(y) for p in invariant)
        y[7] = 2.199
        assert ll_plant.clamp_input(y, np.array([0.1]), 0.05).tolist() == [0.0]
        assert ll_plant.clamp_input(y, np.array([-0.1]), 0.05).tolist() == [-0.1]

    @pytest.mark.parametrize('varied, boxes, inputs', [
        ([0, 0], [(1.8, 2.2), (1.8, 2.2)], [(-1.0, 1.0), (-1.0, 1.0)]),
        ([14], [(0.0, 1.0)], [(-1.0, 1.0)]),
        ([0], [], [(-1.0, 1.0)]),
        ([0], [(2.2, 1.8)], [(-1.0, 1.0)]),
        ([0], [(2.5, 3.0)], [(-1.0, 1.0)]),
        ([0], [(1.8, 2.2)], [(1.0, -1.0)]),
    ])
    def test_invalid_augmentation(self, varied, boxes, inputs):
        with pytest.raises(PlantError):
            augment_with_parameters(laub_loomis_plant(), varied, boxes, inputs)

    def test_cannot_vary_twice(self, ll_plant):
        with pytest.raises(PlantError):
            augment_with_parameters(ll_plant, [0], [(1.8, 2.2)], [(-1.0, 1.0)])

    def test_frozen_parameters_keep_nominal(self, hopf_varied):
        k = hopf_varied.full_parameters(np.array([-0.5]))
        assert k.tolist() == [-0.5]
        assert hopf_plant().nominal().tolist() == [1.0]


class TestPlantAutomaton:
    def test_single_run_location(self, ll_plant):
        automaton = build_plant_automaton(ll_plant)
        assert automaton.location_names() == ('RUN',)
        assert automaton.variable_names()[-1] == 'k1'
        assert automaton.initial_state()[-1] == 2.0

    def test_harmonic_closed_form(self):
        automaton = build_plant_automaton(harmonic_plant())
        trace = simulate(automaton, None, NeverJumpPolicy(), 100, 0.01)
        final = trace.final_state()
        assert final.x[0] == pytest.approx(math.cos(1.0), abs=1e-8)
        assert final.x[1] == pytest.approx(-math.sin(1.0), abs=1e-8)

    def test_calibration_of_a_contraction(self):
        x0 = calibrate_initial_state(contracting_plant(), 1.0, 0.05)
        assert x0.tolist() == pytest.approx([math.exp(-1.0)], abs=1e-6)

    def test_calibration_from_a_given_start(self):
        x0 = calibrate_initial_state(contracting_plant(), 1.0, 0.05, start=(2.0,))
        assert x0[0] == pytest.approx(2.0 * math.exp(-1.0), abs=1e-6)

    def test_mismatched_definition(self):
        with pytest.raises(PlantError):
            dataclasses.replace(harmonic_plant(), default_state=(1.0,))


class TestCatalog:
    def test_names(self):
        assert sorted(PLANT_FACTORIES) == ['contract', 'harmonic', 'hopf', 'laub_loomis']
        assert get_plant('hopf').name == 'hopf'
        assert set(synthetic_plants()) == {'harmonic', 'contract', 'hopf'}

    def test_unknown_plant(self):
        with pytest.raises(PlantError):
            get_plant('lorenz')
