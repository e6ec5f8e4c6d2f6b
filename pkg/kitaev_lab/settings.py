"""
Runtime configuration.

Defaults live in `Settings`; `KPL_*` environment variables (a local `.env`
file is loaded first) override them, and CLI flags override both.
"""

import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from kitaev_lab.errors import ConfigurationError

load_dotenv()

ENV_PREFIX = "KPL_"

# int64 profiles stay exact below 2**63 and their float64 copies below 2**53
FAST_PATH_QUBIT_CEILING = 53


class Settings(BaseModel):
    model_config = ConfigDict(frozen=True)

    threads: int = Field(default=1, ge=1, description="worker processes")
    exact_loss_cap: int = Field(default=20, ge=0, description="max M for the exact lossy mixture")
    exhaustive_limit: int = Field(default=24, ge=0, description="max N for exhaustive search")
    max_qubits: int = Field(default=1000, ge=0, le=1000, description="cap on M for profiles (float range of J)")
    search_max_qubits: int = Field(default=32, ge=1, le=FAST_PATH_QUBIT_CEILING)
    seed: int = Field(default=0, ge=0)
    sim_shards: int = Field(default=8, ge=1)
    log_level: str = "WARNING"


_ENV_FIELDS = {
    "threads": "THREADS",
    "exact_loss_cap": "EXACT_LOSS_CAP",
    "exhaustive_limit": "EXHAUSTIVE_LIMIT",
    "max_qubits": "MAX_QUBITS",
    "search_max_qubits": "SEARCH_MAX_QUBITS",
    "seed": "SEED",
    "sim_shards": "SIM_SHARDS",
    "log_level": "LOG_LEVEL",
}


def load_settings(**overrides: Optional[object]) -> Settings:
    """Build settings from the environment, then apply non-None overrides (CLI flags)."""
    values = {}
    for field, suffix in _ENV_FIELDS.items():
        raw = os.getenv(ENV_PREFIX + suffix)
        if raw is not None and raw.strip() != "":
            values[field] = raw.strip()
    for field, value in overrides.items():
        if value is not None:
            values[field] = value
    try:
        return Settings(**values)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid configuration: {e.errors()[0]['loc'][0]} -> {e.errors()[0]['msg']}") from e


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Process-wide settings, read from the environment on first use."""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


def set_settings(settings: Optional[Settings]) -> None:
    """Install settings for the process (the CLI does this after parsing flags)."""
    global _settings
    _settings = settings
