from src.explorer.config import ExplorerConfig
from src.runner.experiment_config import AbstractionConfig, ExperimentConfig, PropertyConfig, VariedParameter

# Time the nominal Laub-Loomis trajectory from all-ones needs to settle near its cycle.
LAUB_LOOMIS_T_INIT = 7.3781

LAUB_LOOMIS_PROPERTY = PropertyConfig(t_init=LAUB_LOOMIS_T_INIT, delta=0.05, epsilon=0.2, monitored=(0,))
ABSTRACTION_WEIGHTS = AbstractionConfig(default_probability=0.1, favored_probability=0.25, favor='violation')


def _k1_experiment(name: str, rate: float) -> ExperimentConfig:
    """k1 drifts in [1.8, 2.2] with |k1'| <= rate."""
    return ExperimentConfig(
        name=name,
        plant='laub_loomis',
        property=LAUB_LOOMIS_PROPERTY,
        varied=(VariedParameter(0, (1.8, 2.2), (-rate, rate)),),
        abstraction=ABSTRACTION_WEIGHTS,
        explorer=ExplorerConfig(n_iterations=30000, h=0.05, seed=0),
        calibration_horizon=LAUB_LOOMIS_T_INIT,
    )


PRESETS = {
    'exp1': _k1_experiment('exp1', 0.01),
    'exp2': _k1_experiment('exp2', 0.1),
    'exp3': _k1_experiment('exp3', 1.0),
    'abstraction': _k1_experiment('abstraction', 0.1),
}


def preset_names() -> list[str]:
    return sorted(PRESETS)
