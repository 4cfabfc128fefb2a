import json
import os

from src.interfaces.IConfigReader import IConfigReader
from src.runner.experiment_config import ConfigError, ExperimentConfig
from src.runner.presets import PRESETS, preset_names


# Class to resolve built-in experiment names
class PresetConfigReader(IConfigReader):
    def read(self, source: str) -> ExperimentConfig:
        """Returns the preset registered under `source`."""
        if not self.is_preset(source):
            raise ConfigError('preset', f"unknown preset '{source}', expected one of {preset_names()}")
        return PRESETS[source]

    @staticmethod
    def is_preset(source: str) -> bool:
        return source in PRESETS


# Class to read experiment files written with ExperimentConfig.to_dict
class JsonConfigReader(IConfigReader):
    def read(self, source: str) -> ExperimentConfig:
        """Parses a JSON experiment file."""
        try:
            with open(source, 'r') as file:
                data = json.load(file)
        except OSError as e:
            raise ConfigError('file', f"cannot read {source}: {e.strerror}") from e
        except json.JSONDecodeError as e:
            raise ConfigError('file', f"{source} is not valid JSON: {e.msg} at line {e.lineno}") from e
        return ExperimentConfig.from_dict(data)

    @staticmethod
    def is_json(source: str) -> bool:
        """Checks if the source names a JSON file."""
        return source.endswith('.json') or os.path.isfile(source)


# Factory class to get the appropriate config reader
class ConfigReaderFactory:
    def get_reader(self, source: str) -> IConfigReader:
        """Returns the reader for a preset name or a JSON path."""
        if PresetConfigReader.is_preset(source):
            return PresetConfigReader()
        if JsonConfigReader.is_json(source):
            return JsonConfigReader()
        raise ConfigError('experiment', f"'{source}' is neither a preset ({', '.join(preset_names())}) nor a JSON file")

    def read(self, source: str) -> ExperimentConfig:
        return self.get_reader(source).read(source)
