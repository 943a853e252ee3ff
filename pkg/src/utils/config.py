"""
Configuration for partition-ops.

Environment variables come from the root .env file (see .env.example);
per-run settings of the command line are validated by the Config model.
"""

import logging
import os
from functools import lru_cache
from pathlib import Path
from typing import Literal, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator, model_validator
from sympy import isprime

# Load environment variables from root .env
env_path = Path(__file__).parent.parent.parent / '.env'
load_dotenv(dotenv_path=env_path)

logger = logging.getLogger(__name__)


class Settings(BaseModel):
    """Process-wide limits read from the environment."""
    mem_mb: int = Field(2048, ge=16, description="Memory cap for bar-oracle matrices")
    max_prime: int = Field(13, ge=2, description="Largest accepted prime")
    rewrite_limit: int = Field(1_000_000, ge=1, description="Iteration guard for rewriting")
    log_level: str = Field("WARNING")


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Read the PARTITION_OPS_* variables once."""
    settings = Settings(
        mem_mb=int(os.getenv("PARTITION_OPS_MEM_MB", "2048")),
        max_prime=int(os.getenv("PARTITION_OPS_MAX_PRIME", "13")),
        rewrite_limit=int(os.getenv("PARTITION_OPS_REWRITE_LIMIT", "1000000")),
        log_level=os.getenv("PARTITION_OPS_LOG_LEVEL", "WARNING").upper(),
    )
    logger.debug("settings loaded: %s", settings)
    return settings


class Config(BaseModel):
    """
    Per-run configuration of the command line.

    The degree window is a finite closed range ``(lo, hi)``.
    """
    p: int = Field(2, description="The prime")
    grading: Literal["homotopy", "cohomological"] = "homotopy"
    window: Tuple[int, int] = Field((-30, 30), description="Degree window (lo, hi)")
    weight_cap: int = Field(4, ge=1, description="Largest weight enumerated")
    output_format: Literal["json", "csv", "text"] = "text"
    seed: int = Field(0, description="Seed for sampled property runs")
    jobs: int = Field(1, ge=1, le=64)

    @field_validator("p")
    @classmethod
    def _prime_in_bound(cls, value: int) -> int:
        if not isprime(value):
            raise ValueError(f"p={value} is not prime")
        bound = get_settings().max_prime
        if value > bound:
            raise ValueError(f"p={value} exceeds PARTITION_OPS_MAX_PRIME={bound}")
        return value

    @model_validator(mode="after")
    def _finite_window(self) -> "Config":
        lo, hi = self.window
        if hi < lo:
            raise ValueError(f"empty degree window [{lo}, {hi}]")
        return self

    def display_degree(self, degree: int) -> int:
        """Homotopy degrees are canonical; cohomological output negates them."""
        return -degree if self.grading == "cohomological" else degree
