"""Solver configuration using Pydantic Settings."""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide defaults loaded from environment variables."""

    # Logging
    log_level: str = Field(default="INFO", description="Root log level for the CLI")

    # Execution
    default_workers: int = Field(default=1, ge=1, description="Worker processes per estimate")
    walk_batch_size: int = Field(
        default=8192, ge=1, description="Walks advanced together in one vectorised batch"
    )

    # Walk defaults (used when a run configuration leaves them out)
    default_shrink_factor: float = Field(
        default=1.0, gt=0, le=1, description="Sphere shrink factor in (0, 1]"
    )
    default_max_steps: int = Field(default=10_000, ge=1, description="Step budget per walk")
    epsilon_fraction: float = Field(
        default=1e-3, gt=0, description="Default shell width as a fraction of the domain diameter"
    )

    # Estimator policy
    degraded_failure_fraction: float = Field(
        default=0.01, ge=0, le=1, description="Budget-failure fraction that marks a run degraded"
    )
    boundary_range_samples: int = Field(
        default=4096, ge=16, description="Boundary samples used to bound f on the boundary"
    )

    # Samplers and oracles
    rejection_limit: int = Field(
        default=1_000_000, ge=1, description="Rejected proposals before the sampler gives up"
    )
    euler_max_steps: int = Field(
        default=100_000_000, ge=1, description="Time-step budget of the Euler-Maruyama oracle"
    )

    # Validation suite
    validation_scale: float = Field(
        default=1.0, gt=0, le=1, description="Multiplier applied to every validation sample count"
    )
    validation_seed: int = Field(default=20240521, ge=0, description="Master seed of the validation suite")

    model_config = SettingsConfigDict(
        env_prefix="DRIFTWOS_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
    )


# Global settings instance
settings = Settings()
