from .experiment_config import ExperimentConfig, ModelSpec, load_experiment_config, parse_config
from .report import Record, Report
from .runner import run
from .calibration import calibrate

__all__ = [
    'ExperimentConfig',
    'ModelSpec',
    'load_experiment_config',
    'parse_config',
    'Record',
    'Report',
    'run',
    'calibrate'
]
