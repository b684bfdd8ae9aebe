import os
import json
import logging
from dataclasses import dataclass, replace
from typing import Dict, Any, Optional

from .errors import DomainError

# Configure logger
logger = logging.getLogger(__name__)

# Environment variable names
ENV_PREFIX = "TAKAGI_"
CONFIG_FILE_VAR = "TAKAGI_CONFIG_FILE"

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


@dataclass(frozen=True)
class Settings:
    """Runtime defaults shared by the CLI and the HTTP API"""
    precision_bits: int = 128
    tolerance: float = 1e-12
    samples: int = 10_000
    seed: int = 42
    node_budget: int = 1_000_000
    plot_points: int = 4096
    log_level: str = "INFO"

    def with_overrides(self, **overrides: Any) -> "Settings":
        """Return a copy with every non-None override applied and validated"""
        clean = {k: v for k, v in overrides.items() if v is not None}
        return _validate(replace(self, **clean))


# Field name -> parser for environment strings
_PARSERS = {
    "precision_bits": int,
    "tolerance": float,
    "samples": int,
    "seed": int,
    "node_budget": int,
    "plot_points": int,
    "log_level": lambda s: s.strip().upper(),
}


def _read_config_file(path: str) -> Dict[str, Any]:
    """Read optional JSON overrides"""
    if not os.path.exists(path):
        logger.warning(f"Config file not found: {path}")
        return {}
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise DomainError(f"Unreadable config file {path}: {str(e)}")
    if not isinstance(data, dict):
        raise DomainError(f"Config file {path} must hold a JSON object")
    unknown = set(data) - set(_PARSERS)
    if unknown:
        raise DomainError(f"Unknown settings in {path}: {', '.join(sorted(unknown))}")
    return data


def _validate(settings: Settings) -> Settings:
    if settings.precision_bits < 53:
        raise DomainError(f"precision_bits must be >= 53, got {settings.precision_bits}")
    if not settings.tolerance > 0:
        raise DomainError(f"tolerance must be positive, got {settings.tolerance}")
    if settings.samples < 0:
        raise DomainError(f"samples must be non-negative, got {settings.samples}")
    if settings.node_budget < 1:
        raise DomainError(f"node_budget must be positive, got {settings.node_budget}")
    if settings.plot_points < 2:
        raise DomainError(f"plot_points must be >= 2, got {settings.plot_points}")
    if settings.log_level not in LOG_LEVELS:
        raise DomainError(f"log_level must be one of {LOG_LEVELS}, got {settings.log_level}")
    return settings


def load_settings(environ: Optional[Dict[str, str]] = None) -> Settings:
    """
    Build settings from defaults, an optional JSON file and the environment

    Args:
        environ: Mapping to read variables from (defaults to os.environ)

    Returns:
        Validated settings
    """
    environ = os.environ if environ is None else environ
    values: Dict[str, Any] = {}

    config_file = environ.get(CONFIG_FILE_VAR)
    if config_file:
        values.update(_read_config_file(config_file))

    for name, parse in _PARSERS.items():
        raw = environ.get(f"{ENV_PREFIX}{name.upper()}")
        if raw is None or raw == "":
            continue
        try:
            values[name] = parse(raw)
        except ValueError:
            raise DomainError(f"Invalid value for {ENV_PREFIX}{name.upper()}: {raw!r}")

    settings = _validate(replace(Settings(), **values))
    logger.debug(f"Loaded settings: {settings}")
    return settings
