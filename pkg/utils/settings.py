import logging
import os
from typing import Dict, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

logger = logging.getLogger(__name__)

LOG_LEVELS = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG")

# Environment variable -> settings field
ENV_FIELDS: Dict[str, str] = {
    "VERSOR_TOLERANCE": "tolerance",
    "VERSOR_LAMBDA": "lam",
    "VERSOR_CLOSURE_LIMIT": "closure_limit",
    "VERSOR_COXETER_BOUND": "coxeter_bound",
    "VERSOR_ASSOCIATIVITY_SAMPLES": "associativity_samples",
    "VERSOR_RANDOM_SEED": "random_seed",
    "VERSOR_HASH_DECIMALS": "hash_decimals",
    "VERSOR_LOG_LEVEL": "log_level",
}


class EngineSettings(BaseModel):
    """
    Numeric and runtime configuration shared by every pipeline
    """

    tolerance: float = Field(default=1e-9, gt=0)
    lam: float = Field(default=1.0, gt=0)
    closure_limit: int = Field(default=10_000, gt=0)
    coxeter_bound: int = Field(default=1000, gt=0)
    associativity_samples: int = Field(default=1000, ge=0)
    random_seed: int = 0
    hash_decimals: int = Field(default=6, ge=1, le=12)
    float_format: str = "%.12g"
    log_level: str = "WARNING"

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"unknown log level {value!r}")
        return level

    @property
    def hash_scale(self) -> float:
        """Cell size of the rounding hash used before tolerance matching"""
        return 10.0 ** (-self.hash_decimals)


def load_settings(env_file: Optional[str] = None, **overrides) -> EngineSettings:
    """Build settings from .env / environment, then explicit overrides"""
    load_dotenv(dotenv_path=env_file, override=False)

    values = {}
    for env_name, field_name in ENV_FIELDS.items():
        raw = os.getenv(env_name)
        if raw is not None and raw.strip() != "":
            values[field_name] = raw.strip()

    values.update({k: v for k, v in overrides.items() if v is not None})
    settings = EngineSettings(**values)
    logger.debug("Loaded settings: %s", settings.model_dump())
    return settings


DEFAULT_SETTINGS = EngineSettings()
