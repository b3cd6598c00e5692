import time
from functools import wraps
from typing import Type

import numpy as np

from src.core.logger import get_logger


logger = get_logger(__name__)

class LabError(Exception):
    """Base exception class for all laboratory errors."""
    def __init__(self, message: str, *args):
        super().__init__(message, *args)
        logger.error(f"{self.__class__.__name__}: {message}")

class DomainError(LabError):
    """Exception raised when an argument lies outside the domain of an operation."""
    pass

class ShapeMismatchError(LabError):
    """Exception raised when an array does not match its window."""
    pass

class WindowError(LabError):
    """Exception raised for indices outside a window or malformed windows."""
    pass

class MarginError(LabError):
    """Exception raised when an atom key falls outside the sampled margin."""
    pass

class SupportOverflowError(LabError):
    """Exception raised when a combination exceeds the configured support cap."""
    pass

class ModelError(LabError):
    """Exception raised for invalid field models or innovation laws."""
    pass

class NormError(LabError):
    """Exception raised for failed norm computations or non-integrable input."""
    pass

class DecompositionError(LabError):
    """Exception raised when a dyadic term violates its construction invariants."""
    pass

class ConfigError(LabError):
    """Exception raised for configuration-related errors.

    Args:
        message: Human readable diagnostic
        field_path: Dotted path of the offending field, if any
    """
    def __init__(self, message: str, field_path: str = ''):
        self.field_path = field_path
        text = f"{field_path}: {message}" if field_path else message
        super().__init__(text)

class ExperimentError(LabError):
    """Exception raised when an experiment cannot produce a verdict."""
    pass

def handle_numeric_error(error_class: Type[LabError] = LabError):
    """
    Decorator converting numpy/scipy failures into laboratory errors.
    Lab errors raised inside the wrapped function pass through unchanged.
    Args:
        error_class: The specific LabError subclass to raise. Defaults to LabError.
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except LabError:
                raise
            except (FloatingPointError, OverflowError, ZeroDivisionError, np.linalg.LinAlgError) as e:
                error_msg = f"Numeric error in {func.__name__}: {str(e)}"
                logger.error(error_msg, exc_info=True)
                raise error_class(error_msg) from e
            except (ValueError, TypeError) as e:
                error_msg = f"Invalid argument in {func.__name__}: {str(e)}"
                logger.error(error_msg, exc_info=True)
                raise error_class(error_msg) from e
        return wrapper
    return decorator

def require_dimension(d: int):
    """
    Decorator restricting an operation on a field model to one dimension.
    Args:
        d: The only admissible value of the model's `d` attribute.
    """
    def decorator(func):
        @wraps(func)
        def wrapper(model, *args, **kwargs):
            if getattr(model, 'd', None) != d:
                raise DomainError(
                    f"{func.__name__} requires dimension {d}, got {getattr(model, 'd', None)}"
                )
            return func(model, *args, **kwargs)
        return wrapper
    return decorator

def log_method_call(log_level: str = 'DEBUG'):
    """
    Decorator to log function or method entry and exit with elapsed time.
    Args:
        log_level: The logging level to use. Defaults to 'DEBUG'.
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            method_logger = getattr(args[0], 'logger', logger) if args else logger
            log_func = getattr(method_logger, log_level.lower())

            arg_str = ', '.join([f"{type(arg).__name__}" for arg in args] + [f"{k}={v}" for k, v in kwargs.items()])
            log_func(f"Entering {func.__name__}({arg_str})")
            started = time.perf_counter()

            try:
                result = func(*args, **kwargs)
                log_func(f"Exiting {func.__name__} after {time.perf_counter() - started:.3f}s")
                return result
            except Exception as e:
                method_logger.error(f"Error in {func.__name__}: {str(e)}")
                raise
        return wrapper
    return decorator
