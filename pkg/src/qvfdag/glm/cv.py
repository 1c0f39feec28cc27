"""K-fold cross-validation of the lasso penalty."""

from __future__ import annotations

from dataclasses import replace

import numpy as np
import structlog
from numpy.typing import ArrayLike

from qvfdag.common.errors import GlmInputError
from qvfdag.families import LinearPredictor, QvfFamily
from qvfdag.glm.engine import fit_glm, fit_path, lambda_grid, lambda_max, validate_inputs
from qvfdag.glm.types import CvConfig, CvReport, GlmFit

logger = structlog.get_logger()

# lambda_max below this is treated as a null gradient.
_NULL_GRADIENT_TOL = 1e-12


def fold_assignment(n: int, folds: int, rng: np.random.Generator) -> np.ndarray:
    """Return a fold id per row: a seeded shuffle dealt round-robin into ``folds`` groups."""
    assignment = np.empty(n, dtype=np.int64)
    assignment[rng.permutation(n)] = np.arange(n) % folds
    return assignment


def cv_select_lambda(
    response: ArrayLike,
    predictors: ArrayLike,
    family: QvfFamily,
    config: CvConfig | None = None,
    rng: np.random.Generator | None = None,
) -> CvReport:
    """Pick lambda by minimum mean held-out deviance over a log-spaced grid.

    The grid runs from ``lambda_max`` down to ``min_ratio * lambda_max``. A
    constant response or a zero null gradient yields a degenerate report that
    recommends the intercept-only model (``chosen_lambda == lambda_max``).
    """
    cfg = config or CvConfig()
    y, X = validate_inputs(response, predictors, family)
    n = y.shape[0]
    if n < cfg.folds:
        raise GlmInputError(f"need at least {cfg.folds} observations for {cfg.folds}-fold CV, got {n}")
    rng = rng if rng is not None else np.random.default_rng(0)

    lam_max = lambda_max(y, X, family, config=cfg)
    if np.ptp(y) == 0.0 or lam_max <= _NULL_GRADIENT_TOL:
        null = fit_glm(y, None, family, config=cfg)
        logger.debug("cv_degenerate", lambda_max=lam_max, constant_response=bool(np.ptp(y) == 0.0))
        return CvReport(
            lambda_grid=(lam_max,),
            mean_cv_deviance=(null.final_deviance / n,),
            chosen_lambda=lam_max,
            degenerate=True,
        )

    grid = lambda_grid(lam_max, cfg.grid_size, cfg.min_ratio)
    assignment = fold_assignment(n, cfg.folds, rng)
    held_out = np.zeros(len(grid))
    for fold in range(cfg.folds):
        test = assignment == fold
        train = ~test
        fits = fit_path(y[train], X[train], family, grid, config=cfg)
        for i, fit in enumerate(fits):
            eta = fit.predictor.eta(X[test])
            held_out[i] += float(np.sum(family.unit_deviance(y[test], eta)))
    mean_dev = held_out / n
    best = int(np.argmin(mean_dev))
    return CvReport(
        lambda_grid=tuple(grid),
        mean_cv_deviance=tuple(float(v) for v in mean_dev),
        chosen_lambda=grid[best],
    )


def fit_at_chosen(
    response: ArrayLike, predictors: ArrayLike, family: QvfFamily, report: CvReport, config: CvConfig | None = None
) -> GlmFit:
    """Refit on the full sample along the grid down to the chosen lambda.

    A degenerate report returns the intercept-only fit padded with zero
    coefficients.
    """
    y, X = validate_inputs(response, predictors, family)
    if report.degenerate:
        null = fit_glm(y, None, family, config=config)
        return replace(
            null,
            predictor=LinearPredictor(intercept=null.predictor.intercept, coefficients=np.zeros(X.shape[1])),
            lam=report.chosen_lambda,
        )
    path = fit_path(y, X, family, report.lambda_grid[: report.chosen_index + 1], config=config)
    return path[-1]

