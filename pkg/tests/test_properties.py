import math

import numpy as np
import pytest

from src.hybrid.executor import simulate
from src.hybrid.policies import ForcedTransitionPolicy
from src.hybrid.state import DiscreteJump, HybridState, Trace
from src.models.synthetic import contracting_plant, harmonic_plant
from src.properties.layout import MemoryForm, OscillationLayout, OvershootLayout
from src.properties.oscillation import (INIT, LRN, OSC, STD, OscillationTransition, build_oscillation_automaton,
                                        build_oscillation_automaton_z)
from src.properties.overshoot import build_overshoot_automaton, overshoot_value
from src.properties.specs import OscillationSpec, OvershootSpec, PropertySpecError, constant_reference
from src.properties.verdict import ClassificationError, VerdictKind, classify_trace


def jump_steps(trace):
    return [trace[index].state.steps for index, _ in trace.jumps()]


def hopf_falsifying_input(step, state):
    """Hold mu for 14 time units, then drive it down at the input bound."""
    return np.array([0.0]) if step < 1400 else np.array([-0.5])


class TestOscillationAutomaton:
    def test_layout_and_names(self, hopf_automaton):
        assert hopf_automaton.location_names() == (INIT, LRN, STD, OSC)
        assert hopf_automaton.variable_names() == ('x1', 'x2', 'mu', 'c', 'p', 'z_x1', 'z_x2')
        assert [t.name for t in hopf_automaton.transitions()] == [
            'start_learning', 'learn_steady', 'learn_period', 'steady_check', 'steady_lost', 'period_check', 'period_lost']

    def test_only_start_learning_is_optional(self, hopf_automaton):
        optional = [t.id for t in hopf_automaton.transitions() if not t.is_urgent()]
        assert optional == [int(OscillationTransition.START_LEARNING)]

    def test_bounding_box(self, hopf_bounds):
        lower, upper = hopf_bounds
        assert lower.tolist() == [-2.0, -2.0, -1.0, 0.0, 0.0, -4.0, -4.0]
        assert upper.tolist() == [2.0, 2.0, 1.0, 1.0, 1.0, 4.0, 4.0]

    def test_dimension_mismatch(self, harmonic):
        spec = OscillationSpec(t_init=0.5, delta=0.05, epsilon=0.05, monitored=(0,), plant_dim=3)
        with pytest.raises(PropertySpecError):
            build_oscillation_automaton_z(spec, harmonic)

    def test_initial_state_length_checked(self, harmonic, harmonic_spec):
        with pytest.raises(PropertySpecError):
            build_oscillation_automaton_z(harmonic_spec, harmonic, initial_state=(1.0,))


class TestClassification:
    def test_harmonic_oscillates_with_its_period(self, harmonic, harmonic_spec):
        automaton = build_oscillation_automaton_z(harmonic_spec, harmonic)
        trace = simulate(automaton, None, ForcedTransitionPolicy(), 1400, harmonic_spec.h)
        verdict = classify_trace(trace, harmonic_spec)
        assert verdict.kind is VerdictKind.OSCILLATING
        assert abs(verdict.period - 2.0 * math.pi) <= 2.0 * harmonic_spec.h
        assert verdict.cycles >= 1
        start, _ = verdict.evidence_range
        assert trace[start].state.location == OSC

    def test_learning_starts_at_the_transient_bound(self, harmonic, harmonic_spec):
        automaton = build_oscillation_automaton_z(harmonic_spec, harmonic)
        trace = simulate(automaton, None, ForcedTransitionPolicy(), 60, harmonic_spec.h)
        index, jump = next(trace.jumps())
        assert (jump.source, jump.target) == (INIT, LRN)
        assert trace[index].state.steps == 50

    def test_contraction_is_steady(self):
        spec = OscillationSpec(t_init=5.0, delta=0.05, epsilon=0.01, monitored=(0,), plant_dim=1, h=0.05)
        automaton = build_oscillation_automaton_z(spec, contracting_plant())
        trace = simulate(automaton, None, ForcedTransitionPolicy(), 110, spec.h)
        verdict = classify_trace(trace, spec)
        assert verdict.kind is VerdictKind.STEADY
        assert verdict.period == pytest.approx(0.05)
        assert STD in trace.location_sequence()

    def test_short_trace_is_inconclusive(self, harmonic, harmonic_spec):
        automaton = build_oscillation_automaton_z(harmonic_spec, harmonic)
        trace = simulate(automaton, None, ForcedTransitionPolicy(), 10, harmonic_spec.h)
        assert classify_trace(trace, harmonic_spec).kind is VerdictKind.INCONCLUSIVE

    def test_min_cycles_raises_the_bar(self, harmonic):
        spec = OscillationSpec(t_init=0.5, delta=0.01, epsilon=0.005, monitored=(0, 1), plant_dim=2, h=0.01,
                               min_cycles=5)
        automaton = build_oscillation_automaton_z(spec, harmonic)
        trace = simulate(automaton, None, ForcedTransitionPolicy(), 1400, spec.h)
        assert classify_trace(trace, spec).kind is VerdictKind.INCONCLUSIVE

    def test_hopf_falsified_when_mu_is_driven_down(self, hopf_varied):
        spec = OscillationSpec(t_init=0.5, delta=0.01, epsilon=0.005, monitored=(0, 1), plant_dim=2, param_dim=1, h=0.01)
        automaton = build_oscillation_automaton_z(spec, hopf_varied)
        trace = simulate(automaton, hopf_falsifying_input, ForcedTransitionPolicy(), 2100, spec.h)
        verdict = classify_trace(trace, spec)
        assert verdict.kind is VerdictKind.FALSIFIED
        assert abs(verdict.exit_value) > spec.epsilon
        assert verdict.witness_time > 14.0
        assert trace[verdict.witness_index].state.location == INIT
        assert abs(verdict.period - 2.0 * math.pi) <= 2.0 * spec.h

    def test_parameter_stays_in_its_box(self, hopf_varied):
        spec = OscillationSpec(t_init=0.5, delta=0.01, epsilon=0.005, monitored=(0, 1), plant_dim=2, param_dim=1, h=0.01)
        automaton = build_oscillation_automaton_z(spec, hopf_varied)
        trace = simulate(automaton, hopf_falsifying_input, ForcedTransitionPolicy(), 2100, spec.h)
        mu = np.array([state.x[2] for state in trace.states()])
        assert mu.min() >= -1.0
        assert mu[-1] == pytest.approx(-1.0, abs=0.01)

    def test_empty_trace(self, harmonic_spec):
        with pytest.raises(ClassificationError):
            classify_trace(Trace(), harmonic_spec)

    def test_foreign_locations(self, harmonic_spec):
        with pytest.raises(ClassificationError):
            classify_trace(Trace.start(HybridState('RUN', np.zeros(6))), harmonic_spec)


class TestMemoryForms:
    MEMORY_RESETS = {OscillationTransition.START_LEARNING, OscillationTransition.LEARN_STEADY,
                     OscillationTransition.LEARN_PERIOD, OscillationTransition.PERIOD_CHECK,
                     OscillationTransition.PERIOD_LOST}

    def test_forms_agree_on_random_schedules(self, hopf_varied, hopf_spec):
        stored = build_oscillation_automaton(hopf_spec, hopf_varied, form=MemoryForm.STORED_POINT)
        difference = build_oscillation_automaton_z(hopf_spec, hopf_varied)
        memory = list(OscillationLayout.from_spec(hopf_spec).memory())
        rng = np.random.default_rng(7)
        for _ in range(100):
            levels = rng.uniform(-0.5, 0.5, size=8)

            def schedule(step, state, levels=levels):
                return np.array([levels[min(step // 50, len(levels) - 1)]])

            a = simulate(stored, schedule, ForcedTransitionPolicy(), 400, hopf_spec.h)
            b = simulate(difference, schedule, ForcedTransitionPolicy(), 400, hopf_spec.h)
            assert a.location_sequence() == b.location_sequence()
            assert jump_steps(a) == jump_steps(b)

            reference = b[0].state.x[:2].copy()
            for entry_a, entry_b in zip(a, b):
                x_a, x_b = entry_a.state.x, entry_b.state.x
                if isinstance(entry_b.event, DiscreteJump) and entry_b.event.transition_id in self.MEMORY_RESETS:
                    reference = x_b[:2].copy()
                assert x_b[:5] == pytest.approx(x_a[:5], abs=1e-12)
                assert x_b[memory] == pytest.approx(x_a[:2] - x_a[memory], abs=1e-9)
                assert x_b[memory] == pytest.approx(x_b[:2] - reference, abs=1e-9)

    def test_deviation_is_form_independent(self, hopf_spec):
        x = np.array([1.0, 2.0, 0.0, 0.0, 0.0, 0.5, 1.5])
        z = np.array([1.0, 2.0, 0.0, 0.0, 0.0, 0.5, 0.5])
        stored = OscillationLayout.from_spec(hopf_spec, MemoryForm.STORED_POINT)
        difference = OscillationLayout.from_spec(hopf_spec, MemoryForm.DIFFERENCE)
        assert stored.deviation(x, (0, 1)).tolist() == difference.deviation(z, (0, 1)).tolist() == [0.5, 0.5]


class TestOvershoot:
    def test_harmonic_peak_above_zero_reference(self):
        spec = OvershootSpec(constant_reference, delta=0.01, plant_dim=2, monitored=0, reference_initial=(0.0,), h=0.01)
        automaton = build_overshoot_automaton(spec, harmonic_plant(), initial_state=(0.0, 1.0))
        trace = simulate(automaton, None, ForcedTransitionPolicy(), 200, spec.h)
        layout = OvershootLayout(2, 0)
        assert layout.peak == 4
        assert overshoot_value(trace, layout) == pytest.approx(1.0, abs=1e-4)

    def test_peak_is_sampled_on_the_delta_grid(self):
        spec = OvershootSpec(constant_reference, delta=0.5, plant_dim=2, monitored=0, h=0.05)
        automaton = build_overshoot_automaton(spec, harmonic_plant(), initial_state=(0.0, 1.0))
        trace = simulate(automaton, None, ForcedTransitionPolicy(), 40, spec.h)
        assert jump_steps(trace) == [10, 20, 30, 40]
        assert overshoot_value(trace, OvershootLayout(2, 0)) == pytest.approx(math.sin(1.5), abs=1e-5)

    def test_reference_must_be_scalar(self):
        with pytest.raises(PropertySpecError):
            OvershootSpec(lambda x: np.zeros(2), delta=0.05, plant_dim=2)


class TestSpecValidation:
    @pytest.mark.parametrize('kwargs', [
        {'t_init': 0.0},
        {'delta': 0.01},
        {'epsilon': -1.0},
        {'monitored': ()},
        {'monitored': (2,)},
        {'monitored': (0, 0)},
        {'min_cycles': 0},
    ])
    def test_invalid_parameters(self, kwargs):
        values = {'t_init': 0.5, 'delta': 0.05, 'epsilon': 0.05, 'monitored': (0,), 'plant_dim': 2, 'h': 0.05}
        values.update(kwargs)
        with pytest.raises(PropertySpecError):
            OscillationSpec(**values)
