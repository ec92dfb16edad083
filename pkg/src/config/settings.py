import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, field_validator


class Settings(BaseModel):
    """Runtime settings, read from the environment (and an optional .env file)."""

    enumeration_cap: int = 5_000_000
    workers: int = 1
    precision_bits: int = 128
    optimizer: str = "expmech"
    rejection_factor: int = 200
    log_level: str = "WARNING"

    @field_validator("enumeration_cap", "workers", "rejection_factor")
    @classmethod
    def _positive(cls, value: int, info):
        if value < 1:
            raise ValueError(f"{info.field_name} must be >= 1, got {value}")
        return value

    @field_validator("precision_bits")
    @classmethod
    def _enough_bits(cls, value: int):
        if value < 100:
            raise ValueError(f"precision_bits must be >= 100, got {value}")
        return value

    @field_validator("optimizer", "log_level")
    @classmethod
    def _normalize(cls, value: str, info):
        value = value.strip()
        return value.upper() if info.field_name == "log_level" else value.lower()


ENV_PREFIX = "DFL_"


def load_settings() -> Settings:
    """Build settings from DFL_* environment variables."""
    load_dotenv()
    values = {}
    for name in Settings.model_fields:
        raw = os.getenv(ENV_PREFIX + name.upper())
        if raw is not None and raw.strip() != "":
            values[name] = raw
    return Settings(**values)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return load_settings()
