from qvfdag.glm.cv import cv_select_lambda, fit_at_chosen, fold_assignment
from qvfdag.glm.engine import (
    fit_glm,
    fit_path,
    lambda_grid,
    lambda_max,
    negative_log_likelihood,
    nll_gradient,
    predict_mean,
    soft_threshold,
    validate_inputs,
)
from qvfdag.glm.types import CvConfig, CvReport, GlmFit

__all__ = [
    "CvConfig",
    "CvReport",
    "GlmFit",
    "cv_select_lambda",
    "fit_at_chosen",
    "fit_glm",
    "fit_path",
    "fold_assignment",
    "lambda_grid",
    "lambda_max",
    "negative_log_likelihood",
    "nll_gradient",
    "predict_mean",
    "soft_threshold",
    "validate_inputs",
]
