from .error_handler import (
    LabError,
    DomainError,
    ShapeMismatchError,
    WindowError,
    MarginError,
    SupportOverflowError,
    ModelError,
    NormError,
    DecompositionError,
    ConfigError,
    ExperimentError,
    handle_numeric_error,
    require_dimension,
    log_method_call
)
from .settings import SETTINGS, load_calibration
from .logger import get_logger, VERDICT

__all__ = [
    'LabError',
    'DomainError',
    'ShapeMismatchError',
    'WindowError',
    'MarginError',
    'SupportOverflowError',
    'ModelError',
    'NormError',
    'DecompositionError',
    'ConfigError',
    'ExperimentError',
    'handle_numeric_error',
    'require_dimension',
    'log_method_call',
    'SETTINGS',
    'load_calibration',
    'get_logger',
    'VERDICT'
]
