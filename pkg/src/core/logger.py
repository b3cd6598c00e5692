import logging
import os
from pathlib import Path
from typing import Dict, Optional

from colorama import Fore, Style, init
from concurrent_log_handler import ConcurrentRotatingFileHandler

from src.core.settings import SETTINGS


init(autoreset=True)

LOG_SETTINGS = SETTINGS['logging']

# Replications log from pool threads, so file records carry the thread name
FILE_FORMAT = '%(asctime)s - %(threadName)s - %(name)s - %(levelname)s - %(message)s'

# INFO (20) < VERDICT (25) < WARNING (30)
VERDICT = 25
logging.addLevelName(VERDICT, 'VERDICT')

def verdict(self, message, *args, **kwargs):
    """Log a '[experiment] STATUS detail' line at the VERDICT level."""
    if self.isEnabledFor(VERDICT):
        self._log(VERDICT, message, args, **kwargs)

logging.Logger.verdict = verdict

def resolve_logs_dir() -> Path:
    """
    $LIL_LAB_ROOT/logs, created on demand.

    Falls back to ./logs when the lab root cannot be written.
    """
    root = os.getenv('LIL_LAB_ROOT') or os.getcwd()
    os.environ.setdefault('LIL_LAB_ROOT', root)
    try:
        logs_dir = Path(root) / 'logs'
        logs_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        print(f"Error setting up log directory: {e}")
        logs_dir = Path('logs')
        logs_dir.mkdir(exist_ok=True)
    return logs_dir

LOGS_DIR = resolve_logs_dir()

def level_from_name(level_name: str) -> int:
    """Map a configured level name, VERDICT included, to its number."""
    if level_name.upper() == 'VERDICT':
        return VERDICT
    return getattr(logging, level_name.upper(), logging.INFO)

class ColoredVerdictFormatter(logging.Formatter):
    """Colorizes verdict lines of the form '[experiment] PASS statistic=value'."""

    COLORS = {'PASS': Fore.GREEN, 'FAIL': Fore.RED, 'RECORDED': Fore.YELLOW}

    def format(self, record):
        message = record.getMessage()
        if record.levelno != VERDICT or not message.startswith('['):
            return super().format(record)
        tag, rest = message.split(']', 1)
        status, _, detail = rest.strip().partition(' ')
        return (
            f"{Fore.CYAN}{tag}] "
            f"{self.COLORS.get(status, Fore.WHITE)}{status} "
            f"{Fore.WHITE}{detail}"
            f"{Style.RESET_ALL}"
        )

class LabLogger:
    """
    Process-wide logger registry.

    The console shows VERDICT records only; every named logger also writes
    to its own rotating file under LOGS_DIR.
    """

    def __init__(self, logs_dir: Path = LOGS_DIR):
        self.logs_dir = logs_dir
        self.loggers: Dict[Optional[str], logging.Logger] = {}
        self.setup_console()

    def setup_console(self):
        root_logger = logging.getLogger()
        root_logger.setLevel(logging.DEBUG)
        root_logger.handlers.clear()

        console_handler = logging.StreamHandler()
        console_handler.setLevel(level_from_name(LOG_SETTINGS['console_level']))
        console_handler.addFilter(lambda record: record.levelno == VERDICT)
        console_handler.setFormatter(ColoredVerdictFormatter('%(message)s'))
        root_logger.addHandler(console_handler)

    def file_handler(self, name: Optional[str]) -> Optional[logging.Handler]:
        """Rotating file handler for one logger, None if the file cannot be opened."""
        log_file = self.logs_dir / f"{name or 'lil_lab'}.log"
        try:
            handler = ConcurrentRotatingFileHandler(
                filename=str(log_file),
                maxBytes=LOG_SETTINGS['max_bytes'],
                backupCount=LOG_SETTINGS['backup_count']
            )
        except Exception as e:
            print(f"Error setting up log file handler: {e}")
            return None
        handler.setFormatter(logging.Formatter(FILE_FORMAT))
        handler.setLevel(level_from_name(LOG_SETTINGS['file_level']))
        return handler

    def get_logger(self, name: Optional[str] = None) -> logging.Logger:
        if name in self.loggers:
            return self.loggers[name]

        logger = logging.getLogger(name)
        if not any(isinstance(h, ConcurrentRotatingFileHandler) for h in logger.handlers):
            handler = self.file_handler(name)
            if handler is not None:
                logger.addHandler(handler)

        self.loggers[name] = logger
        return logger

_registry = LabLogger()

def get_logger(name: Optional[str] = None) -> logging.Logger:
    """Get a logger from the lab registry."""
    return _registry.get_logger(name)
