"""IRLS and l1-penalized GLM fitting.

The objective for a response ``y`` and design ``X`` (n x q) is

    (1/n) * sum_i nll(y_i, theta_0 + x_i . theta) + lam * sum_k |theta_k|

with the intercept left unpenalized. Each IRLS iteration forms the weighted
least-squares surrogate at the current linear predictor and solves it exactly
(``lam == 0``) or by covariance-mode coordinate descent (``lam > 0``). A step
that would increase the objective is halved up to ``max_halvings`` times.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
import structlog
from numpy.typing import ArrayLike, NDArray

from qvfdag.common.errors import DimensionMismatchError, GlmInputError
from qvfdag.families import LinearPredictor, QvfFamily
from qvfdag.glm.types import CvConfig, GlmFit

logger = structlog.get_logger()

_MIN_WEIGHT = 1e-10
_MAX_CD_SWEEPS = 1000
_CD_TOL = 1e-13

_DEFAULT_CONFIG = CvConfig()


def soft_threshold(z: ArrayLike, gamma: float) -> float | NDArray[np.float64]:
    """sign(z) * max(|z| - gamma, 0)."""
    s = np.sign(z) * np.maximum(np.abs(z) - gamma, 0.0)
    return float(s) if np.ndim(s) == 0 else s


def validate_inputs(
    response: ArrayLike, predictors: ArrayLike | None, family: QvfFamily
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    y = np.asarray(response, dtype=np.float64).reshape(-1)
    n = y.shape[0]
    if n < 2:
        raise GlmInputError(f"need at least 2 observations, got {n}")
    X = np.zeros((n, 0)) if predictors is None else np.asarray(predictors, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != n:
        raise DimensionMismatchError(f"predictors must be an {n} x q matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise GlmInputError("predictors contain non-finite values")
    family.check_response(y)
    return y, X


def _objective(
    y: NDArray[np.float64], X: NDArray[np.float64], family: QvfFamily, theta: NDArray[np.float64], lam: float
) -> float:
    eta = theta[0] + X @ theta[1:]
    value = float(np.mean(family.nll(y, eta)))
    if lam > 0:
        value += lam * float(np.sum(np.abs(theta[1:])))
    return value


def negative_log_likelihood(
    predictor: LinearPredictor, response: ArrayLike, predictors: ArrayLike | None, family: QvfFamily
) -> float:
    """Average negative log-likelihood (up to terms free of the parameters)."""
    y, X = validate_inputs(response, predictors, family)
    return _objective(y, X, family, predictor.as_vector(), 0.0)


def nll_gradient(
    predictor: LinearPredictor, response: ArrayLike, predictors: ArrayLike | None, family: QvfFamily
) -> NDArray[np.float64]:
    """Gradient of the average negative log-likelihood in (intercept, coefficients)."""
    y, X = validate_inputs(response, predictors, family)
    d = family.nll_derivative(y, predictor.eta(X))
    n = y.shape[0]
    return np.concatenate(([d.mean()], X.T @ d / n))


def _solve_wls(X: NDArray[np.float64], z: NDArray[np.float64], w: NDArray[np.float64]) -> NDArray[np.float64]:
    A = np.column_stack((np.ones(X.shape[0]), X))
    sw = np.sqrt(w)
    theta, *_ = np.linalg.lstsq(A * sw[:, None], z * sw, rcond=None)
    return np.asarray(theta, dtype=np.float64)


def _solve_lasso_wls(
    X: NDArray[np.float64],
    z: NDArray[np.float64],
    w: NDArray[np.float64],
    lam: float,
    start: NDArray[np.float64],
) -> NDArray[np.float64]:
    """Minimize 0.5 * theta' G theta - c' theta + lam * |theta[1:]|_1 by coordinate descent.

    ``G`` and ``c`` are the weighted Gram matrix and cross-product of ``[1, X]``
    scaled by 1/n, so every coordinate update costs O(q).
    """
    n = X.shape[0]
    A = np.column_stack((np.ones(n), X))
    wa = A * (w / n)[:, None]
    G = A.T @ wa
    c = wa.T @ z
    diag = np.diag(G).copy()
    theta = start.copy()
    g_theta = G @ theta
    scale = max(1.0, float(np.sum(w * z * z) / n))
    penalties = np.full(theta.shape[0], lam)
    penalties[0] = 0.0

    def sweep(coords: Sequence[int]) -> float:
        worst = 0.0
        for k in coords:
            if diag[k] <= 0.0:
                continue
            old = theta[k]
            r = c[k] - g_theta[k] + diag[k] * old
            new = r / diag[k] if k == 0 else math.copysign(max(abs(r) - penalties[k], 0.0), r) / diag[k]
            delta = new - old
            if delta != 0.0:
                theta[k] = new
                g_theta[:] += delta * G[:, k]
                worst = max(worst, diag[k] * delta * delta)
        return worst

    all_coords = list(range(theta.shape[0]))
    for _ in range(_MAX_CD_SWEEPS):
        if sweep(all_coords) < _CD_TOL * scale:
            break
        active = [0, *[k for k in all_coords[1:] if theta[k] != 0.0]]
        for _ in range(_MAX_CD_SWEEPS):
            if sweep(active) < _CD_TOL * scale:
                break
    return theta


def _null_start(y: NDArray[np.float64], family: QvfFamily, q: int) -> NDArray[np.float64]:
    theta = np.zeros(q + 1)
    theta[0] = float(family.link(y.mean()))
    return theta


def fit_glm(
    response: ArrayLike,
    predictors: ArrayLike | None,
    family: QvfFamily,
    lam: float = 0.0,
    *,
    config: CvConfig | None = None,
    start: LinearPredictor | None = None,
) -> GlmFit:
    """Fit one node's GLM on a conditioning set (intercept-only when q = 0).

    Non-convergence is reported through ``GlmFit.converged``; callers decide
    whether that is fatal.
    """
    if lam < 0 or not math.isfinite(lam):
        raise GlmInputError(f"lambda must be a nonnegative finite number, got {lam}")
    cfg = config or _DEFAULT_CONFIG
    y, X = validate_inputs(response, predictors, family)
    q = X.shape[1]
    if start is not None:
        if start.q != q:
            raise DimensionMismatchError(f"warm start has {start.q} coefficients, design has {q} columns")
        theta = start.as_vector()
    else:
        theta = _null_start(y, family, q)

    obj = _objective(y, X, family, theta, lam)
    path = [obj]
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iter + 1):  # noqa: B007
        eta = theta[0] + X @ theta[1:]
        w = np.maximum(family.fisher_weight(eta), _MIN_WEIGHT)
        z = eta - family.nll_derivative(y, eta) / w
        proposal = _solve_wls(X, z, w) if lam == 0 else _solve_lasso_wls(X, z, w, lam, theta)

        new_obj = _objective(y, X, family, proposal, lam)
        halvings = 0
        while not new_obj <= obj + 1e-12 * abs(obj) and halvings < cfg.max_halvings:
            proposal = 0.5 * (theta + proposal)
            new_obj = _objective(y, X, family, proposal, lam)
            halvings += 1
        if not new_obj <= obj + 1e-12 * abs(obj):
            logger.debug("glm_step_rejected", iteration=iterations, objective=obj)
            break

        change = abs(obj - new_obj) / (abs(new_obj) + 0.1)
        theta, obj = proposal, new_obj
        path.append(obj)
        if change < cfg.tol:
            converged = True
            break

    if lam > 0:
        # Coordinate descent produces exact zeros; halving can leave tiny residue.
        theta[1:][np.abs(theta[1:]) < 1e-15] = 0.0
    predictor = LinearPredictor(intercept=float(theta[0]), coefficients=theta[1:].copy())
    deviance = float(np.sum(family.unit_deviance(y, predictor.eta(X))))
    if not converged:
        logger.warning("glm_not_converged", family=family.label(), lam=lam, iterations=iterations, q=q)
    return GlmFit(
        predictor=predictor,
        converged=converged,
        iterations=iterations,
        final_deviance=deviance,
        lam=float(lam),
        objective_path=tuple(path),
    )


def predict_mean(fit: GlmFit, family: QvfFamily, predictors: ArrayLike) -> NDArray[np.float64]:
    """Fitted means ``mean_from_eta(theta_0 + x_i . theta)`` per row."""
    X = np.asarray(predictors, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != fit.predictor.q:
        raise DimensionMismatchError(
            f"fit has {fit.predictor.q} coefficients but predictors have shape {X.shape}"
        )
    return np.asarray(family.mean_from_eta(fit.predictor.eta(X)), dtype=np.float64).reshape(-1)


def lambda_max(response: ArrayLike, predictors: ArrayLike, family: QvfFamily, *, config: CvConfig | None = None) -> float:
    """Smallest lambda at which every coefficient is zero (from the null-model gradient)."""
    y, X = validate_inputs(response, predictors, family)
    if X.shape[1] == 0:
        return 0.0
    null = fit_glm(y, None, family, config=config)
    d = family.nll_derivative(y, np.full(y.shape[0], null.predictor.intercept))
    return float(np.max(np.abs(X.T @ d)) / y.shape[0])


def lambda_grid(lam_max: float, grid_size: int, min_ratio: float) -> list[float]:
    """Log-spaced, strictly decreasing grid from ``lam_max`` to ``min_ratio * lam_max``."""
    if grid_size == 1:
        return [lam_max]
    return [float(v) for v in np.geomspace(lam_max, min_ratio * lam_max, grid_size)]


def fit_path(
    response: ArrayLike,
    predictors: ArrayLike,
    family: QvfFamily,
    lambdas: Sequence[float],
    *,
    config: CvConfig | None = None,
) -> list[GlmFit]:
    """Fit along a decreasing lambda sequence, warm-starting each fit from the previous one."""
    y, X = validate_inputs(response, predictors, family)
    fits: list[GlmFit] = []
    start: LinearPredictor | None = None
    for lam in lambdas:
        fit = fit_glm(y, X, family, lam, config=config, start=start)
        fits.append(fit)
        start = fit.predictor
    return fits
