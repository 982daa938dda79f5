from functools import lru_cache
from typing import Optional

from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class SieveConfig(BaseModel):
    """Sizes of the Möbius sieve."""
    default_bound: int = Field(default=1_000_001, ge=2)
    full_bound: int = Field(default=15_600_000, ge=2)


class RandomConfig(BaseModel):
    """Settings for random quota complexes."""
    grid_step_factor: float = Field(default=1e-3, gt=0, le=0.1)
    monte_carlo_block: int = Field(default=10_000, ge=1)
    subset_walk_limit: int = Field(default=20, ge=1)
    # Largest |∫f − 1| accepted when a density is sampled onto its grid
    mass_tolerance: float = Field(default=1e-2, gt=0, lt=1)


class Settings(BaseSettings):
    """Main application settings."""
    app_name: str = "quotatope"

    threads: Optional[int] = Field(default=None, ge=1)
    log_level: str = "INFO"
    log_file: Optional[str] = None

    # Exhaustive enumeration guard (vertices)
    enumeration_limit: int = Field(default=24, ge=1, le=30)
    # Largest scaled quota handled by the integer counting table in core
    dp_cell_limit: int = Field(default=5_000_000, ge=1)
    critical_point_xtol: float = Field(default=1e-9, gt=0)

    sieve: SieveConfig = SieveConfig()
    random: RandomConfig = RandomConfig()

    model_config = SettingsConfigDict(
        env_prefix="QUOTATOPE_",
        env_file=".env",
        env_nested_delimiter='__',
        case_sensitive=False,
        extra='ignore',
        validate_default=True
    )


@lru_cache()
def get_settings() -> Settings:
    """
    Get cached settings instance.
    Returns:
        Settings: Application settings instance
    """
    return Settings()
