from __future__ import annotations

import csv
import dataclasses
import logging
import os
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from src.abstraction.export import export_edge_list, export_matrix_csv, export_states_csv
from src.abstraction.metropolis import (TargetDistribution, TransitionMatrix, expected_hitting_times, mh_matrix,
                                        stationary_distribution, target_distribution, violation_states)
from src.abstraction.predicate_map import oscillation_predicate_map
from src.abstraction.transition_system import AbstractTransitionSystem, build_abstraction, eliminate_self_loops
from src.explorer.guided_explorer import falsify
from src.explorer.report import FalsificationReport
from src.hybrid.automaton import HybridAutomaton
from src.models.catalog import get_plant
from src.models.plant import PlantDefinition, PlantError, augment_with_parameters, calibrate_initial_state
from src.properties.layout import MemoryForm, OscillationLayout
from src.properties.oscillation import INIT, OSC, build_oscillation_automaton_z
from src.properties.specs import OscillationSpec, PropertySpecError
from src.runner.experiment_config import ConfigError, ExperimentConfig
from src.runner.trace_records import write_trace_csv
from src.utils.tools import Tools

MATRIX_FILE = 'matrix.csv'
MATRIX_ROUNDED_FILE = 'matrix_rounded.csv'
EDGES_FILE = 'edges.txt'
STATES_FILE = 'states.csv'
# Two decimals, the precision of published walk matrices; matrix.csv keeps full precision.
ROUNDED_DECIMALS = 2


@dataclass(eq=False)
class Experiment:
    """Everything built from one config before exploration starts."""
    config: ExperimentConfig
    plant: PlantDefinition
    spec: OscillationSpec
    automaton: HybridAutomaton
    bounds: tuple[np.ndarray, np.ndarray]
    abstraction: AbstractTransitionSystem
    system: AbstractTransitionSystem
    target: TargetDistribution
    matrix: TransitionMatrix


def build_plant(config: ExperimentConfig) -> PlantDefinition:
    try:
        plant = get_plant(config.plant)
    except PlantError as e:
        raise ConfigError("plant", str(e)) from e
    if not config.varied:
        return plant
    try:
        return augment_with_parameters(plant, [v.index for v in config.varied], [v.box for v in config.varied],
                                       [v.input_box for v in config.varied])
    except PlantError as e:
        raise ConfigError("varied_parameters", str(e)) from e


def resolve_config(config: ExperimentConfig, logger: Optional[logging.Logger] = None) -> ExperimentConfig:
    """Fill in `initial_state` (calibration run or plant default) so the echoed config is explicit."""
    if config.initial_state is not None:
        return config
    logger = logger or logging.getLogger(__name__)
    plant = build_plant(config)
    if config.calibration_horizon is not None:
        x0 = calibrate_initial_state(plant, config.calibration_horizon, config.explorer.h, logger=logger)
    else:
        x0 = np.array(plant.default_state, dtype=float)
    return dataclasses.replace(config, initial_state=tuple(float(v) for v in x0))


def _target(config: ExperimentConfig, system: AbstractTransitionSystem) -> TargetDistribution:
    settings = config.abstraction
    by_label = {state.label: state for state in system.states()}
    overrides = {}
    for label, weight in settings.overrides.items():
        if label not in by_label:
            raise ConfigError(f"abstraction.overrides.{label}", f"no abstract state named '{label}'")
        overrides[by_label[label]] = weight
    favored = violation_states(system, OSC, INIT) if settings.favor == 'violation' else ()
    return target_distribution(system, settings.default_probability, favored, settings.favored_probability, overrides)


def build_experiment(config: ExperimentConfig, logger: Optional[logging.Logger] = None) -> Experiment:
    """
    Plant, z-form property automaton, abstraction without self-loops and its walk matrix.

    Raises:
        ConfigError: when the config does not fit the plant.
    """
    logger = logger or logging.getLogger(__name__)
    config = resolve_config(config, logger)
    plant = build_plant(config)
    prop = config.property
    try:
        spec = OscillationSpec(prop.t_init, prop.delta, prop.epsilon, prop.monitored, plant.dimension,
                               plant.param_dim(), config.explorer.h, prop.min_cycles)
    except PropertySpecError as e:
        raise ConfigError("property", str(e)) from e
    if len(config.initial_state) != plant.dimension:
        raise ConfigError('initial_state', f"expected {plant.dimension} entries, got {len(config.initial_state)}")
    automaton = build_oscillation_automaton_z(spec, plant, config.initial_state, logger)
    bounds = OscillationLayout.from_spec(spec, MemoryForm.DIFFERENCE).bounding_box(plant, spec.t_init)
    predicate_map = oscillation_predicate_map(spec, automaton.variable_names())
    abstraction = build_abstraction(automaton, predicate_map, bounds, config.abstraction.budget,
                                    config.abstraction.seed, logger)
    system = eliminate_self_loops(abstraction)
    target = _target(config, system)
    matrix = mh_matrix(system, target)
    logger.info(f"Experiment {config.name}: {abstraction.size()} abstract states, {len(abstraction.edges())} edges, "
                f"{system.size()} after self-loop elimination")
    return Experiment(config, plant, spec, automaton, bounds, abstraction, system, target, matrix)


def abstraction_summary(experiment: Experiment) -> dict:
    """Sizes of the abstraction and the walk's expected time from the initial state to a violation cell."""
    system, matrix = experiment.system, experiment.matrix
    favored = violation_states(system, OSC, INIT)
    hitting = None
    if favored:
        times = expected_hitting_times(matrix, favored)
        hitting = Tools.finite_or_none(times[matrix.index_of(system.initial())])
    return {
        'states': experiment.abstraction.size(),
        'edges': len(experiment.abstraction.edges()),
        'states_without_self_loops': system.size(),
        'unknown_edges': len(experiment.abstraction.unknown_edges()),
        'violation_states': [s.label for s in favored],
        'hitting_time_to_violation': hitting,
    }


def run_experiment(config: ExperimentConfig, logger: Optional[logging.Logger] = None) -> FalsificationReport:
    """
    Build the experiment, run one guided exploration and write its files into `config.output.directory`:
    `report_<seed>.json`, `timing_<seed>.json`, `trace_<seed>.csv` and, on request, `goals_<seed>.csv`.
    """
    logger = logger or logging.getLogger(__name__)
    experiment = build_experiment(config, logger)
    config = experiment.config
    report, sampler = falsify(experiment.automaton, experiment.spec, experiment.system, experiment.matrix,
                              config.explorer, experiment.bounds, MemoryForm.DIFFERENCE,
                              record_goals=config.output.goal_log, logger=logger)
    report.config = config.to_dict()
    report.abstraction = abstraction_summary(experiment)

    seed = config.explorer.seed
    out = Tools.ensure_directory(config.output.directory)
    Tools.write_json(os.path.join(out, f"report_{seed}.json"), report.to_dict())
    Tools.write_json(os.path.join(out, f"timing_{seed}.json"), report.timing())
    if config.output.write_trace and report.witness_trace is not None:
        with open(os.path.join(out, f"trace_{seed}.csv"), 'w', newline='') as file:
            write_trace_csv(report.witness_trace, experiment.automaton, file)
    if config.output.goal_log:
        _write_goal_log(os.path.join(out, f"goals_{seed}.csv"), sampler.goal_log())
    logger.info(f"{config.name} seed {seed}: {report.verdict.kind.value}, files in {out}")
    return report


def _write_goal_log(path: str, rows):
    with open(path, 'w', newline='') as file:
        writer = csv.writer(file, lineterminator='\n')
        writer.writerow(['iteration', 'state', 'goal'])
        for iteration, label, point in rows:
            writer.writerow([iteration, label, ' '.join(repr(float(v)) for v in point)])


def emit_matrix(config: ExperimentConfig, logger: Optional[logging.Logger] = None) -> Experiment:
    """Write the walk matrix (full and rounded), the edge list and the state table."""
    logger = logger or logging.getLogger(__name__)
    experiment = build_experiment(config, logger)
    out = Tools.ensure_directory(config.output.directory)
    with open(os.path.join(out, MATRIX_FILE), 'w', newline='') as file:
        export_matrix_csv(experiment.matrix, file)
    with open(os.path.join(out, MATRIX_ROUNDED_FILE), 'w', newline='') as file:
        export_matrix_csv(experiment.matrix, file, ROUNDED_DECIMALS)
    with open(os.path.join(out, EDGES_FILE), 'w') as file:
        file.write(export_edge_list(experiment.abstraction))
    with open(os.path.join(out, STATES_FILE), 'w', newline='') as file:
        export_states_csv(experiment.system, file, experiment.target)
    pi = stationary_distribution(experiment.matrix)
    logger.info("Stationary distribution: "
                + ', '.join(f"{s.label}={p:.4f}" for s, p in zip(experiment.matrix.states(), pi)))
    return experiment


def scale(config: ExperimentConfig, points: Sequence[int], logger: Optional[logging.Logger] = None) -> list[dict]:
    """
    Time full explorations (no early stop) at several point budgets.

    Returns:
        list[dict]: One row per budget with seconds, tree size and the runtime ratio to the first budget.
    """
    logger = logger or logging.getLogger(__name__)
    experiment = build_experiment(config, logger)
    rows = []
    for n in points:
        explorer = dataclasses.replace(experiment.config.explorer, n_iterations=int(n), stop_on_falsification=False)
        started = time.perf_counter()
        report, _ = falsify(experiment.automaton, experiment.spec, experiment.system, experiment.matrix, explorer,
                            experiment.bounds, MemoryForm.DIFFERENCE, logger=logger)
        seconds = time.perf_counter() - started
        rows.append({'points': int(n), 'seconds': seconds, 'tree_size': report.tree_size,
                     'verdict': report.verdict.kind.value})
        logger.info(f"{n} points: {seconds:.2f} s, {report.tree_size} nodes")
    for row in rows:
        row['ratio'] = row['seconds'] / rows[0]['seconds'] if rows and rows[0]['seconds'] > 0 else None
    return rows
