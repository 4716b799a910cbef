"""
Runtime configuration for georisk.

Defaults can be overridden through a `.env` file at the project root
(see env.txt for the template) or through regular environment variables.
"""

import os
import logging
from functools import lru_cache
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator

from georisk.errors import ConfigurationError

# Load environment variables
env_path = Path(__file__).parent.parent / '.env'
load_dotenv(env_path)

logger = logging.getLogger(__name__)


class Settings(BaseModel):
    """Numerical defaults shared by every module"""

    pos_floor: float = Field(default=1e-12, gt=0)
    prob_tol: float = Field(default=1e-12, gt=0)
    samples: int = Field(default=500, ge=1)
    tolerance: float = Field(default=1e-9, gt=0)
    confirm_margin: float = Field(default=1e-7, gt=0)
    orlicz_bracket: float = Field(default=1e6, gt=1)
    max_permutation_atoms: int = Field(default=9, ge=1)
    log_dir: str = 'logs'
    archive_path: Optional[str] = None

    @field_validator('archive_path')
    @classmethod
    def _empty_as_none(cls, value):
        return value or None


def _env(name: str, default):
    return os.getenv(f'GEORISK_{name.upper()}', default)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """
    Build the settings from the environment (cached)

    Returns:
        Settings: validated configuration

    Raises:
        ConfigurationError: when an environment value is out of range
    """
    raw = {name: _env(name, field.default) for name, field in Settings.model_fields.items()}
    try:
        settings = Settings(**raw)
    except ValidationError as e:
        logger.error(f"Invalid georisk configuration: {e}")
        raise ConfigurationError(str(e)) from e
    logger.debug(f"Settings loaded: {settings.model_dump()}")
    return settings
