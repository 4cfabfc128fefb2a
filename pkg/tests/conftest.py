import numpy as np
import pytest

from src.abstraction.metropolis import mh_matrix, target_distribution, violation_states
from src.abstraction.predicate_map import oscillation_predicate_map
from src.abstraction.transition_system import build_abstraction, eliminate_self_loops
from src.models.laub_loomis import laub_loomis_plant
from src.models.plant import augment_with_parameters
from src.models.synthetic import harmonic_plant, hopf_plant
from src.properties.layout import MemoryForm, OscillationLayout
from src.properties.oscillation import INIT, OSC, build_oscillation_automaton_z
from src.properties.specs import OscillationSpec


@pytest.fixture
def harmonic():
    return harmonic_plant()


@pytest.fixture
def harmonic_spec():
    return OscillationSpec(t_init=0.5, delta=0.01, epsilon=0.005, monitored=(0, 1), plant_dim=2, h=0.01)


@pytest.fixture
def hopf_varied():
    """Hopf normal form with mu in [-1, 1] driven by mu' = u, |u| <= 0.5."""
    return augment_with_parameters(hopf_plant(), [0], [(-1.0, 1.0)], [(-0.5, 0.5)])


@pytest.fixture
def hopf_spec():
    return OscillationSpec(t_init=0.5, delta=0.05, epsilon=0.05, monitored=(0, 1), plant_dim=2, param_dim=1, h=0.05)


@pytest.fixture
def hopf_automaton(hopf_varied, hopf_spec):
    return build_oscillation_automaton_z(hopf_spec, hopf_varied)


@pytest.fixture
def hopf_bounds(hopf_varied, hopf_spec):
    return OscillationLayout.from_spec(hopf_spec, MemoryForm.DIFFERENCE).bounding_box(hopf_varied, hopf_spec.t_init)


@pytest.fixture
def hopf_abstraction(hopf_automaton, hopf_spec, hopf_bounds):
    predicate_map = oscillation_predicate_map(hopf_spec, hopf_automaton.variable_names())
    return build_abstraction(hopf_automaton, predicate_map, hopf_bounds)


@pytest.fixture
def ll_plant():
    """Laub-Loomis with k1 in [1.8, 2.2] and |k1'| <= 0.1."""
    return augment_with_parameters(laub_loomis_plant(), [0], [(1.8, 2.2)], [(-0.1, 0.1)])


@pytest.fixture
def ll_spec():
    return OscillationSpec(t_init=7.3781, delta=0.05, epsilon=0.2, monitored=(0,), plant_dim=7, param_dim=1, h=0.05)


@pytest.fixture
def ll_automaton(ll_plant, ll_spec):
    return build_oscillation_automaton_z(ll_spec, ll_plant)


@pytest.fixture
def ll_bounds(ll_plant, ll_spec):
    return OscillationLayout.from_spec(ll_spec, MemoryForm.DIFFERENCE).bounding_box(ll_plant, ll_spec.t_init)


@pytest.fixture
def ll_abstraction(ll_automaton, ll_spec, ll_bounds):
    predicate_map = oscillation_predicate_map(ll_spec, ll_automaton.variable_names())
    return build_abstraction(ll_automaton, predicate_map, ll_bounds)


@pytest.fixture
def ll_system(ll_abstraction):
    return eliminate_self_loops(ll_abstraction)


@pytest.fixture
def ll_target(ll_system):
    return target_distribution(ll_system, 0.1, violation_states(ll_system, OSC, INIT), 0.25)


@pytest.fixture
def ll_matrix(ll_system, ll_target):
    return mh_matrix(ll_system, ll_target)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
