"""
Run settings. Precedence, lowest first: defaults, a shadowcalc.toml or
shadowcalc.yaml file, explicit overrides (CLI flags), SHADOWCALC_SEED.
"""
import logging
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import toml
import yaml

from shadowcalc.errors import ParseError

logger = logging.getLogger(__name__)

# =============================================================================
# 1. CONFIGURATION & CONSTANTS
# =============================================================================

CONFIG_FILES = ("shadowcalc.toml", "shadowcalc.yaml", "shadowcalc.yml")
SEED_ENV = "SHADOWCALC_SEED"
BACKENDS = ("family", "matrix")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


@dataclass(frozen=True)
class Settings:
    seed: int = 0
    instances: Optional[int] = None
    backend: str = "family"
    jobs: int = 1
    log_level: str = "WARNING"
    report_dir: str = "reports"

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


# =============================================================================
# 2. LOADING
# =============================================================================

def _read(path: Path) -> Dict[str, Any]:
    text = path.read_text(encoding="utf-8")
    try:
        if path.suffix == ".toml":
            data = toml.loads(text)
        else:
            data = yaml.safe_load(text) or {}
    except (toml.TomlDecodeError, yaml.YAMLError) as e:
        raise ParseError(f"cannot parse {path}: {e}", path=str(path))
    if not isinstance(data, dict):
        raise ParseError(f"{path} must hold a mapping", path=str(path))
    # [shadowcalc] table or top level
    return data.get("shadowcalc", data)


def find_config(directory: Union[str, Path] = ".") -> Optional[Path]:
    for name in CONFIG_FILES:
        path = Path(directory) / name
        if path.is_file():
            return path
    return None


def _checked(settings: Settings) -> Settings:
    if settings.backend not in BACKENDS:
        raise ParseError(f"backend must be one of {BACKENDS}, got {settings.backend!r}")
    if settings.log_level.upper() not in LOG_LEVELS:
        raise ParseError(f"log level must be one of {LOG_LEVELS}, got {settings.log_level!r}")
    if settings.instances is not None and settings.instances < 1:
        raise ParseError("instances must be positive")
    if settings.jobs < 1:
        raise ParseError("jobs must be positive")
    return replace(settings, log_level=settings.log_level.upper())


def load_settings(path: Optional[Union[str, Path]] = None,
                  overrides: Optional[Mapping[str, Any]] = None,
                  environ: Optional[Mapping[str, str]] = None) -> Settings:
    """Merge all sources; None-valued overrides are ignored."""
    known = {f.name for f in fields(Settings)}
    values: Dict[str, Any] = {}

    source = Path(path) if path else find_config()
    if source is not None:
        data = _read(source)
        unknown = set(data) - known
        if unknown:
            logger.warning("ignoring unknown settings %s in %s", sorted(unknown), source)
        values.update({k: v for k, v in data.items() if k in known})
        logger.debug("settings loaded from %s", source)

    values.update({k: v for k, v in (overrides or {}).items() if k in known and v is not None})

    env = os.environ if environ is None else environ
    if env.get(SEED_ENV):
        try:
            values["seed"] = int(env[SEED_ENV])
        except ValueError:
            raise ParseError(f"{SEED_ENV} must be an integer, got {env[SEED_ENV]!r}")

    try:
        settings = Settings(**values)
    except TypeError as e:
        raise ParseError(f"bad settings: {e}")
    return _checked(settings)
