"""Overdispersion-ratio estimators.

For a node ``j`` and a conditioning set ``S`` the ratio compares the
omega-weighted conditional variance of ``X_j`` with its weighted mean. It is
1 when ``S`` holds every parent of ``j`` and exceeds 1 otherwise, which is
what lets the layer learner peel off one topological layer at a time.
"""

from __future__ import annotations

from collections.abc import Collection, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
import structlog
from numpy.typing import ArrayLike, NDArray

from qvfdag.common.errors import DegenerateColumnError, GlmConvergenceError, GlmInputError, QvfDagError
from qvfdag.common.utils import STREAM_RATIO, parallel_map, stream_rng
from qvfdag.families import WEIGHT_TOL, QvfFamily
from qvfdag.glm import CvConfig, cv_select_lambda, fit_at_chosen, fit_glm, predict_mean

logger = structlog.get_logger()


def _label(node: int | None) -> str:
    return "?" if node is None else str(node + 1)


def unconditional_ratio(column: ArrayLike, family: QvfFamily, *, node: int | None = None) -> float:
    """Var(X) / ((beta1 + beta2 * E[X]) * E[X]) from plain sample moments (divisor n)."""
    x = np.asarray(column, dtype=np.float64).reshape(-1)
    if x.shape[0] < 2:
        raise GlmInputError(f"node {_label(node)}: need at least 2 observations, got {x.shape[0]}")
    mean = float(x.mean())
    var = float(np.var(x))
    factor = family.beta1 + family.beta2 * mean
    if mean == 0.0 or var == 0.0 or abs(factor) <= WEIGHT_TOL:
        raise DegenerateColumnError(
            f"node {_label(node)}: ratio undefined (mean={mean:.6g}, variance={var:.6g})", node=node
        )
    return var / (factor * mean)


def uses_penalized_fit(cond_size: int, n: int) -> bool:
    """The l1-penalized variant kicks in once the conditioning set reaches half the sample size."""
    return cond_size >= n / 2


def conditional_ratio(
    j: int,
    cond_set: Collection[int],
    data: NDArray[np.float64],
    family: QvfFamily,
    *,
    cv_config: CvConfig | None = None,
    rng: np.random.Generator | None = None,
) -> float:
    """Residual-moment estimate of R(j, S).

    Fits the GLM of ``X_j`` on ``X_S``, then returns
    ``mean(omega_i**2 * (x_ij - mu_i)**2) / mean(omega_i * x_ij)`` with
    ``omega_i = (beta1 + beta2 * mu_i) ** -1`` evaluated at the fitted means.
    An empty ``cond_set`` falls back to :func:`unconditional_ratio`.
    """
    y = data[:, j]
    if not cond_set:
        return unconditional_ratio(y, family, node=j)
    if np.ptp(y) == 0.0:
        raise DegenerateColumnError(f"node {j + 1}: constant column", node=j)
    cols = sorted(cond_set)
    X = data[:, cols]
    n = y.shape[0]
    if uses_penalized_fit(len(cols), n):
        report = cv_select_lambda(y, X, family, cv_config, rng)
        fit = fit_at_chosen(y, X, family, report, cv_config)
    else:
        fit = fit_glm(y, X, family, config=cv_config)
    if not fit.converged:
        raise GlmConvergenceError(f"node {j + 1}: GLM on {len(cols)} predictors did not converge", node=j)

    mu = predict_mean(fit, family, X)
    weights = np.asarray(family.omega(mu, node=j), dtype=np.float64)
    numerator = float(np.mean(weights**2 * (y - mu) ** 2))
    denominator = float(np.mean(weights * y))
    if denominator <= 0.0:
        raise DegenerateColumnError(f"node {j + 1}: weighted mean is not positive", node=j)
    return numerator / denominator


@dataclass(frozen=True)
class RatioStep:
    """Ratios of every unlayered node against one conditioning set."""

    step: int
    cond_set: frozenset[int]
    ratios: dict[int, float] = field(default_factory=dict)
    penalized: frozenset[int] = frozenset()
    degenerate: frozenset[int] = frozenset()
    failures: dict[int, str] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "step": self.step,
            "cond_set": sorted(v + 1 for v in self.cond_set),
            "ratios": {str(j + 1): r for j, r in sorted(self.ratios.items())},
            "penalized": sorted(v + 1 for v in self.penalized),
            "degenerate": sorted(v + 1 for v in self.degenerate),
            "failures": {str(j + 1): msg for j, msg in sorted(self.failures.items())},
        }


@dataclass
class RatioTable:
    steps: list[RatioStep] = field(default_factory=list)

    def append(self, step: RatioStep) -> None:
        self.steps.append(step)

    def to_json(self) -> list[dict]:
        return [s.to_json() for s in self.steps]


def ratios_for_candidates(
    candidates: Collection[int],
    cond_set: Collection[int],
    data: NDArray[np.float64],
    families: Sequence[QvfFamily] | Mapping[int, QvfFamily],
    *,
    cv_config: CvConfig | None = None,
    seed: int = 0,
    step: int = 0,
    n_jobs: int = 1,
) -> RatioStep:
    """Compute R(j, S) for every candidate, one independent job per node.

    Per-node failures are recorded on the returned step instead of aborting
    the remaining nodes; degenerate columns are listed separately.
    """
    cond = frozenset(cond_set)
    n = data.shape[0]

    def one(j: int) -> tuple[int, float | None, str | None, bool]:
        rng = stream_rng(seed, STREAM_RATIO, step, j)
        try:
            return j, conditional_ratio(j, cond, data, families[j], cv_config=cv_config, rng=rng), None, False
        except DegenerateColumnError as exc:
            logger.info("ratio_degenerate_column", node=j + 1, step=step, reason=str(exc))
            return j, None, None, True
        except QvfDagError as exc:
            logger.warning("ratio_failed", node=j + 1, step=step, error=str(exc))
            return j, None, str(exc), False

    results = parallel_map(one, sorted(candidates), n_jobs=n_jobs)
    ratios = {j: r for j, r, _, _ in results if r is not None}
    failures = {j: err for j, _, err, _ in results if err is not None}
    degenerate = frozenset(j for j, _, _, flag in results if flag)
    penalized = frozenset(candidates) if cond and uses_penalized_fit(len(cond), n) else frozenset()
    return RatioStep(
        step=step,
        cond_set=cond,
        ratios=ratios,
        penalized=penalized - degenerate,
        degenerate=degenerate,
        failures=failures,
    )
