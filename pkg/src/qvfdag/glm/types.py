"""Types for GLM fits and lambda selection."""

from dataclasses import dataclass, field

from pydantic import BaseModel, ConfigDict, Field

from qvfdag.families import LinearPredictor


class CvConfig(BaseModel):
    """Cross-validation settings for the lasso path."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    folds: int = Field(default=5, ge=2)
    grid_size: int = Field(default=50, ge=1)
    min_ratio: float = Field(default=0.01, gt=0.0, lt=1.0)
    max_iter: int = Field(default=100, ge=1)
    tol: float = Field(default=1e-8, gt=0.0)
    max_halvings: int = Field(default=20, ge=0)


@dataclass(frozen=True)
class GlmFit:
    """Fitted linear predictor plus IRLS diagnostics."""

    predictor: LinearPredictor
    converged: bool
    iterations: int
    final_deviance: float
    lam: float = 0.0
    # Penalized objective after each accepted iteration (index 0 = starting point).
    objective_path: tuple[float, ...] = field(default_factory=tuple)

    @property
    def nonzero(self) -> list[int]:
        """Column indices of nonzero coefficients."""
        return [int(k) for k in (self.predictor.coefficients != 0.0).nonzero()[0]]


@dataclass(frozen=True)
class CvReport:
    """Mean held-out deviance along a strictly decreasing lambda grid."""

    lambda_grid: tuple[float, ...]
    mean_cv_deviance: tuple[float, ...]
    chosen_lambda: float
    degenerate: bool = False  # constant response or zero null gradient: intercept-only recommended

    @property
    def chosen_index(self) -> int:
        return self.lambda_grid.index(self.chosen_lambda)

    def to_json(self) -> dict:
        return {
            "lambda_grid": list(self.lambda_grid),
            "mean_cv_deviance": list(self.mean_cv_deviance),
            "chosen_lambda": self.chosen_lambda,
            "degenerate": self.degenerate,
        }
