from abc import ABC, abstractmethod


class IConfigReader(ABC):
    @abstractmethod
    def read(self, source: str):
        """
        Build an experiment configuration.

        Args:
            source (str): A preset name or a path, depending on the reader.

        Returns:
            ExperimentConfig: The parsed configuration.

        Raises:
            ConfigError: on unknown sources or invalid fields.
        """
        pass
