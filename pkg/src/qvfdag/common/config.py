"""Runtime configuration via environment variables."""

from functools import lru_cache
from typing import Literal

import numpy as np
from pydantic import model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Reproducibility
    seed: int = 0  # Base seed when --seed is not given (QVF_DAG_SEED)
    threads: int = 0  # Worker count; 0 = all available cores

    # Layer reconstruction: epsilon grid is 10 ** (start + step * s), s = 0..count-1
    epsilon_grid_start: float = -2.0
    epsilon_grid_step: float = 0.15
    epsilon_grid_count: int = 61

    # Stability selection of epsilon
    stability_splits: int = 5
    stability_c: float = 0.9

    # Cross-validated lasso
    cv_folds: int = 5
    cv_grid_size: int = 50
    cv_min_ratio: float = 0.01  # smallest lambda = min_ratio * lambda_max

    # IRLS
    glm_max_iter: int = 100
    glm_tol: float = 1e-8
    glm_max_halvings: int = 20

    # Evaluation
    hm_normalization: Literal["skeleton", "ordered"] = "skeleton"

    # Output
    record_timing: bool = True  # Set False for byte-identical repeated runs
    log_level: str = "INFO"
    log_format: Literal["json", "console"] = "json"

    model_config = SettingsConfigDict(env_prefix="QVF_DAG_", env_file=".env", env_file_encoding="utf-8")

    @model_validator(mode="after")
    def _check_constraints(self) -> "Settings":
        """Validate numeric constraints between settings."""
        if not 0.0 < self.stability_c < 1.0:
            raise ValueError(f"stability_c must be in (0, 1), got {self.stability_c}")
        if self.stability_splits < 1:
            raise ValueError(f"stability_splits must be >= 1, got {self.stability_splits}")
        if self.cv_folds < 2:
            raise ValueError(f"cv_folds must be >= 2, got {self.cv_folds}")
        if self.cv_grid_size < 1 or self.epsilon_grid_count < 1:
            raise ValueError("cv_grid_size and epsilon_grid_count must be >= 1")
        if not 0.0 < self.cv_min_ratio < 1.0:
            raise ValueError(f"cv_min_ratio must be in (0, 1), got {self.cv_min_ratio}")
        if self.epsilon_grid_step <= 0:
            raise ValueError(f"epsilon_grid_step must be positive, got {self.epsilon_grid_step}")
        if self.threads < 0:
            raise ValueError(f"threads must be >= 0, got {self.threads}")
        if self.glm_max_iter < 1 or self.glm_tol <= 0:
            raise ValueError("glm_max_iter must be >= 1 and glm_tol positive")
        return self

    def epsilon_grid(self) -> list[float]:
        """Return the strictly increasing epsilon grid."""
        exponents = self.epsilon_grid_start + self.epsilon_grid_step * np.arange(self.epsilon_grid_count)
        return [float(v) for v in 10.0**exponents]


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return a cached Settings instance (created on first call)."""
    return Settings()


def reset_settings() -> None:
    """Clear the cached settings so the next call re-reads env vars."""
    get_settings.cache_clear()

