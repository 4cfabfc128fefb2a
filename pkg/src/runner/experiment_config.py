from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any, Optional

from src.explorer.config import ExplorerConfig

FAVOR_MODES = ('violation', 'none')


class ConfigError(Exception):
    """Invalid experiment configuration; `path` is the dotted field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


def _require(data: dict, key: str, path: str) -> Any:
    if not isinstance(data, dict):
        raise ConfigError(path, f"expected an object, got {type(data).__name__}")
    if key not in data:
        raise ConfigError(f"{path}.{key}" if path else key, "missing field")
    return data[key]


def _section(data: Any, path: str) -> dict:
    if not isinstance(data, dict):
        raise ConfigError(path, f"expected an object, got {type(data).__name__}")
    return data


def _number(value: Any, path: str, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    if positive and value <= 0:
        raise ConfigError(path, f"must be positive, got {value}")
    return float(value)


def _pair(value: Any, path: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(path, f"expected [lo, hi], got {value!r}")
    lo, hi = _number(value[0], f"{path}[0]"), _number(value[1], f"{path}[1]")
    if lo > hi:
        raise ConfigError(path, f"lower bound {lo} above upper bound {hi}")
    return lo, hi


def _integers(value: Any, path: str) -> tuple[int, ...]:
    if not isinstance(value, (list, tuple)) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise ConfigError(path, f"expected a list of integers, got {value!r}")
    return tuple(value)


@dataclass(frozen=True)
class VariedParameter:
    """Parameter k_index (0-based) promoted to state with k' = u."""
    index: int
    box: tuple[float, float]
    input_box: tuple[float, float]

    def to_dict(self) -> dict:
        return {'index': self.index, 'box': list(self.box), 'input_box': list(self.input_box)}

    @staticmethod
    def from_dict(data: dict, path: str) -> VariedParameter:
        index = _require(data, 'index', path)
        if not isinstance(index, int) or isinstance(index, bool) or index < 0:
            raise ConfigError(f"{path}.index", f"expected a non-negative integer, got {index!r}")
        return VariedParameter(index, _pair(_require(data, 'box', path), f"{path}.box"),
                               _pair(_require(data, 'input_box', path), f"{path}.input_box"))


@dataclass(frozen=True)
class PropertyConfig:
    t_init: float
    delta: float
    epsilon: float
    monitored: tuple[int, ...] = (0,)
    min_cycles: int = 1

    def to_dict(self) -> dict:
        return {'t_init': self.t_init, 'delta': self.delta, 'epsilon': self.epsilon,
                'monitored': list(self.monitored), 'min_cycles': self.min_cycles}

    @staticmethod
    def from_dict(data: dict, path: str = 'property') -> PropertyConfig:
        _section(data, path)
        min_cycles = data.get('min_cycles', 1)
        if not isinstance(min_cycles, int) or min_cycles < 1:
            raise ConfigError(f"{path}.min_cycles", f"expected an integer >= 1, got {min_cycles!r}")
        return PropertyConfig(
            t_init=_number(_require(data, 't_init', path), f"{path}.t_init", positive=True),
            delta=_number(_require(data, 'delta', path), f"{path}.delta", positive=True),
            epsilon=_number(_require(data, 'epsilon', path), f"{path}.epsilon", positive=True),
            monitored=_integers(data.get('monitored', [0]), f"{path}.monitored"),
            min_cycles=min_cycles,
        )


@dataclass(frozen=True)
class AbstractionConfig:
    """Target weights of the walk: `favored_probability` on favored cells, `default_probability` elsewhere."""
    default_probability: float = 0.1
    favored_probability: float = 0.25
    favor: str = 'violation'
    overrides: dict[str, float] = field(default_factory=dict)
    budget: int = 10000
    seed: int = 0

    def to_dict(self) -> dict:
        return {'default_probability': self.default_probability, 'favored_probability': self.favored_probability,
                'favor': self.favor, 'overrides': dict(self.overrides), 'budget': self.budget, 'seed': self.seed}

    @staticmethod
    def from_dict(data: dict, path: str = 'abstraction') -> AbstractionConfig:
        _section(data, path)
        favor = data.get('favor', 'violation')
        if favor not in FAVOR_MODES:
            raise ConfigError(f"{path}.favor", f"expected one of {FAVOR_MODES}, got {favor!r}")
        overrides = data.get('overrides', {})
        if not isinstance(overrides, dict):
            raise ConfigError(f"{path}.overrides", "expected an object of state label to weight")
        budget = data.get('budget', 10000)
        if not isinstance(budget, int) or budget < 1:
            raise ConfigError(f"{path}.budget", f"expected an integer >= 1, got {budget!r}")
        return AbstractionConfig(
            default_probability=_number(data.get('default_probability', 0.1), f"{path}.default_probability", positive=True),
            favored_probability=_number(data.get('favored_probability', 0.25), f"{path}.favored_probability", positive=True),
            favor=favor,
            overrides={str(k): _number(v, f"{path}.overrides.{k}", positive=True) for k, v in overrides.items()},
            budget=budget,
            seed=int(data.get('seed', 0)),
        )


@dataclass(frozen=True)
class OutputConfig:
    directory: str = 'out'
    write_trace: bool = True
    goal_log: bool = False

    def to_dict(self) -> dict:
        return {'directory': self.directory, 'write_trace': self.write_trace, 'goal_log': self.goal_log}

    @staticmethod
    def from_dict(data: dict, path: str = 'output') -> OutputConfig:
        _section(data, path)
        return OutputConfig(str(data.get('directory', 'out')), bool(data.get('write_trace', True)),
                            bool(data.get('goal_log', False)))


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Everything one experiment needs; `to_dict` and `from_dict` are exact inverses.

    `initial_state` is the plant's x0. When it is absent and `calibration_horizon` is set,
    x0 is computed by a calibration run and written back into the resolved config.
    """
    name: str
    plant: str
    property: PropertyConfig
    varied: tuple[VariedParameter, ...] = ()
    abstraction: AbstractionConfig = field(default_factory=AbstractionConfig)
    explorer: ExplorerConfig = field(default_factory=ExplorerConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    initial_state: Optional[tuple[float, ...]] = None
    calibration_horizon: Optional[float] = None

    def with_seed(self, seed: int) -> ExperimentConfig:
        return dataclasses.replace(self, explorer=self.explorer.with_seed(seed))

    def with_points(self, n_iterations: int) -> ExperimentConfig:
        return dataclasses.replace(self, explorer=dataclasses.replace(self.explorer, n_iterations=n_iterations))

    def with_output(self, directory: str) -> ExperimentConfig:
        return dataclasses.replace(self, output=dataclasses.replace(self.output, directory=directory))

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'plant': self.plant,
            'varied_parameters': [v.to_dict() for v in self.varied],
            'property': self.property.to_dict(),
            'abstraction': self.abstraction.to_dict(),
            'explorer': self.explorer.to_dict(),
            'output': self.output.to_dict(),
            'initial_state': list(self.initial_state) if self.initial_state is not None else None,
            'calibration_horizon': self.calibration_horizon,
        }

    @staticmethod
    def from_dict(data: dict) -> ExperimentConfig:
        if not isinstance(data, dict):
            raise ConfigError('', "the configuration must be an object")
        plant = _require(data, 'plant', '')
        if not isinstance(plant, str):
            raise ConfigError('plant', f"expected a plant name, got {plant!r}")
        varied_data = data.get('varied_parameters', [])
        if not isinstance(varied_data, list):
            raise ConfigError('varied_parameters', "expected a list")
        varied = tuple(VariedParameter.from_dict(v, f"varied_parameters[{i}]") for i, v in enumerate(varied_data))
        try:
            explorer = ExplorerConfig.from_dict(data.get('explorer', {}))
        except (ValueError, TypeError, KeyError) as e:
            raise ConfigError('explorer', str(e)) from e
        initial_state = data.get('initial_state')
        if initial_state is not None:
            if not isinstance(initial_state, list):
                raise ConfigError('initial_state', "expected a list of numbers")
            initial_state = tuple(_number(v, f"initial_state[{i}]") for i, v in enumerate(initial_state))
        horizon = data.get('calibration_horizon')
        if horizon is not None:
            horizon = _number(horizon, 'calibration_horizon', positive=True)
        return ExperimentConfig(
            name=str(data.get('name', plant)),
            plant=plant,
            property=PropertyConfig.from_dict(_require(data, 'property', '')),
            varied=varied,
            abstraction=AbstractionConfig.from_dict(data.get('abstraction', {})),
            explorer=explorer,
            output=OutputConfig.from_dict(data.get('output', {})),
            initial_state=initial_state,
            calibration_horizon=horizon,
        )
