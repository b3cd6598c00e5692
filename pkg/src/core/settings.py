import yaml
from pathlib import Path

CONFIG_DIR = Path(__file__).parent.parent.parent / 'config'

REQUIRED_SECTIONS = [
    'project',
    'logging',
    'concurrency',
    'limits',
    'numerics',
    'monte_carlo',
    'report',
    'calibration'
]

CALIBRATION_CAPS = ['dyadic_ratio_cap', 'growth_ratio_cap']

def _read_mapping(path: Path, what: str) -> dict:
    if not path.exists():
        raise Exception(f"{what} not found at: {path}")
    if not path.is_file():
        raise Exception(f"Path exists but is not a file: {path}")
    try:
        with open(path, 'r') as file:
            content = yaml.safe_load(file)
    except yaml.YAMLError as e:
        raise Exception(f"Error parsing YAML in {path.name}: {str(e)}")
    except PermissionError as e:
        raise Exception(f"Permission denied accessing {path.name}: {str(e)}")
    if not isinstance(content, dict):
        raise Exception(f"{what} must contain a valid YAML dictionary")
    return content

def load_settings(config_path: Path = CONFIG_DIR / 'config.yaml') -> dict:
    """
    Load library settings from config.yaml.

    Args:
        config_path: Path of the YAML settings file

    Returns:
        dict: Parsed settings, one mapping per section

    Raises:
        Exception: If the file is missing, malformed or lacks a section
    """
    try:
        settings = _read_mapping(config_path, 'Configuration file')

        missing_sections = [section for section in REQUIRED_SECTIONS if section not in settings]
        if missing_sections:
            raise Exception(f"Missing required configuration sections: {', '.join(missing_sections)}")

        scalar_sections = [section for section in REQUIRED_SECTIONS if not isinstance(settings[section], dict)]
        if scalar_sections:
            raise Exception(f"Configuration sections must be mappings: {', '.join(scalar_sections)}")

        return settings

    except Exception as e:
        print(f"Critical Error: {str(e)}")  # logger depends on SETTINGS
        raise

def load_calibration(path: Path = None) -> dict:
    """
    Load the frozen verdict thresholds.

    Each cap is a mapping 'd<dimension>' -> positive number.

    Args:
        path: Calibration file, project.calibration_file under config/ by default

    Raises:
        Exception: If the file is missing or a cap is malformed
    """
    path = path or CONFIG_DIR / SETTINGS['project']['calibration_file']
    calibration = _read_mapping(path, 'Calibration file')
    for key in CALIBRATION_CAPS:
        caps = calibration.get(key, {})
        if not isinstance(caps, dict):
            raise Exception(f"{path.name}: {key} must map dimensions to caps")
        for dim, cap in caps.items():
            if not str(dim).startswith('d') or not isinstance(cap, (int, float)) or cap <= 0:
                raise Exception(f"{path.name}: {key}.{dim} must be a positive number, got {cap!r}")
    return calibration

SETTINGS = load_settings()
