"""
settings.py - Environment-driven defaults for the composer CLI.

Values come from the process environment (and a ``.env`` file when present);
command-line flags override them.
"""

import logging
import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

logger = logging.getLogger(__name__)

ENV_PREFIX = "COMPOSER_"
_settings = None


class Settings(BaseModel):
    log_level: str = "WARNING"
    object_cap: int = Field(4, ge=1)
    both_orientations: bool = False
    reoptimize: bool = False
    async_backups: bool = False
    bench_workers: int = Field(1, ge=1)
    # 0 caps the reduction rounds at the repository size
    max_reduction_rounds: int = Field(0, ge=0)

    @property
    def reduction_rounds(self) -> Optional[int]:
        return self.max_reduction_rounds or None


def load_settings(env_file: Optional[str] = None) -> Settings:
    """Read COMPOSER_* variables; ``env_file`` replaces the usual ``.env`` lookup.

    Variables already in the environment win over the file.
    """
    load_dotenv(env_file)
    raw = {}
    for name in Settings.model_fields:
        value = os.getenv(ENV_PREFIX + name.upper())
        if value is not None and value.strip() != "":
            raw[name] = value.strip()
    try:
        settings = Settings.model_validate(raw)
    except ValidationError as exc:
        bad = ", ".join(ENV_PREFIX + str(err["loc"][0]).upper() for err in exc.errors())
        raise ValueError(f"Invalid configuration in {bad}: {exc}") from exc
    if logging.getLevelName(settings.log_level.upper()) not in (10, 20, 30, 40, 50):
        raise ValueError(f"Invalid configuration in {ENV_PREFIX}LOG_LEVEL: {settings.log_level}")
    return settings


def get_settings() -> Settings:
    global _settings
    if _settings is None:
        _settings = load_settings()
        logger.debug(f"Loaded settings: {_settings}")
    return _settings


def reset_settings() -> None:
    """Forget the cached settings so the next access rereads the environment."""
    global _settings
    _settings = None
