"""
Planner settings.

Values come from the environment (prefix ``FOON_``) or a local ``.env`` file.
Nothing is required; every key has a working default.

Usage:
    from app.core.config import get_settings

    settings = get_settings()
    settings.max_nodes
"""

from functools import lru_cache
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="FOON_", env_file=".env", extra="ignore")

    # Path-forest expansion limits
    max_nodes: int = Field(100_000, ge=1)
    max_children: int = Field(4096, ge=1)
    max_depth: int = Field(64, ge=1)

    # Delegation
    epsilon: float = Field(0.05, gt=0)

    # Monte Carlo
    trials: int = Field(10_000, ge=1)
    seed: int = Field(0, ge=0)
    workers: int = Field(1, ge=1)

    log_level: str = "INFO"

    # Result cache (disabled when unset)
    redis_url: Optional[str] = None
    cache_ttl: int = 7200  # 2 hours


@lru_cache
def get_settings() -> Settings:
    return Settings()
