"""Layer-by-layer reconstruction of the topological structure."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import structlog
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from qvfdag.common.config import Settings
from qvfdag.common.errors import DataError, FamilyConfigError, GlmInputError, LayerLearningError
from qvfdag.common.utils import STREAM_STABILITY, stream_rng
from qvfdag.families import FamilyKind, QvfFamily, resolve_families
from qvfdag.glm import CvConfig
from qvfdag.graph import TopologicalLayers
from qvfdag.learning.ratio import RatioTable, ratios_for_candidates
from qvfdag.learning.stability import StabilityReport, run_stability
from qvfdag.learning.thresholds import assign_layer

logger = structlog.get_logger()

# Below this many rows ratio estimates are too noisy to trust.
MIN_ROWS = 20


def default_epsilon_grid(start: float = -2.0, step: float = 0.15, count: int = 61) -> tuple[float, ...]:
    """{10 ** (start + step * s) : s = 0..count-1}."""
    return tuple(float(v) for v in 10.0 ** (start + step * np.arange(count)))


class LayerLearnConfig(BaseModel):
    """How each layer's threshold is picked, plus the per-node families."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    epsilon_mode: Literal["fixed", "stability"] = "stability"
    # One value per layer in fixed mode; the last value is reused for deeper layers.
    epsilon: tuple[float, ...] | None = None
    epsilon_grid: tuple[float, ...] = Field(default_factory=default_epsilon_grid)
    stability_splits: int = Field(default=5, ge=1)
    stability_c: float = Field(default=0.9, gt=0.0, lt=1.0)
    families: tuple[QvfFamily, ...] | None = None
    cv: CvConfig = Field(default_factory=CvConfig)
    seed: int = 0
    n_jobs: int = Field(default=1, ge=1)

    @field_validator("epsilon", mode="before")
    @classmethod
    def _coerce_epsilon(cls, value: object) -> object:
        if isinstance(value, int | float):
            return (float(value),)
        return value

    @model_validator(mode="after")
    def _check(self) -> LayerLearnConfig:
        grid = self.epsilon_grid
        if not grid or any(g <= 0 for g in grid) or any(b <= a for a, b in zip(grid, grid[1:], strict=False)):
            raise ValueError("epsilon_grid must be nonempty, positive and strictly increasing")
        if self.epsilon_mode == "fixed":
            if not self.epsilon:
                raise ValueError("fixed epsilon mode requires at least one epsilon")
            if any(e <= 0 for e in self.epsilon):
                raise ValueError("epsilon values must be positive")
        return self

    def epsilon_for(self, t: int) -> float:
        assert self.epsilon is not None
        return self.epsilon[min(t, len(self.epsilon) - 1)]

    @classmethod
    def from_settings(cls, settings: Settings, **overrides: object) -> LayerLearnConfig:
        base: dict[str, object] = {
            "epsilon_grid": tuple(settings.epsilon_grid()),
            "stability_splits": settings.stability_splits,
            "stability_c": settings.stability_c,
            "cv": CvConfig(
                folds=settings.cv_folds,
                grid_size=settings.cv_grid_size,
                min_ratio=settings.cv_min_ratio,
                max_iter=settings.glm_max_iter,
                tol=settings.glm_tol,
                max_halvings=settings.glm_max_halvings,
            ),
            "seed": settings.seed,
        }
        base.update(overrides)
        return cls.model_validate(base)


@dataclass
class LayerResult:
    layers: TopologicalLayers
    ratio_table: RatioTable
    epsilons_used: list[float]
    fallback_flags: list[bool]
    # Nodes placed without passing the threshold: degenerate columns or the last remaining node.
    forced: list[frozenset[int]] = field(default_factory=list)
    stability: list[StabilityReport | None] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "layers": self.layers.to_json(),
            "epsilons": list(self.epsilons_used),
            "fallbacks": list(self.fallback_flags),
            "forced": [sorted(v + 1 for v in f) for f in self.forced],
            "ratios": self.ratio_table.to_json(),
            "stability": [None if s is None else s.to_json() for s in self.stability],
        }


def prepare_data(data: ArrayLike) -> NDArray[np.float64]:
    matrix = np.asarray(data, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] == 0 or matrix.shape[1] == 0:
        raise DataError(f"data must be a nonempty n x p matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise GlmInputError("data contains non-finite values")
    return matrix


def learner_families(families: Sequence[QvfFamily] | None, data: NDArray[np.float64]) -> list[QvfFamily]:
    """Default every node to Poisson, reject mixtures, and fill in binomial trials."""
    p = data.shape[1]
    chosen = list(families) if families is not None else [QvfFamily.poisson()] * p
    if len(chosen) != p:
        raise FamilyConfigError(f"{len(chosen)} families configured for {p} columns")
    for j, fam in enumerate(chosen):
        if fam.kind is FamilyKind.MIXTURE:
            raise FamilyConfigError(f"node {j + 1}: the learner needs a single QVF family, not a mixture")
    return resolve_families(chosen, data)


def reconstruct_layers(data: ArrayLike, config: LayerLearnConfig | None = None) -> LayerResult:
    """Peel off layers until every node is assigned.

    At step t the ratios of all unassigned nodes are computed against the union
    of the layers found so far; nodes within ``epsilon_t`` of 1 form the next
    layer. Each step assigns at least one node, so at most p steps run.
    """
    cfg = config or LayerLearnConfig()
    matrix = prepare_data(data)
    n, p = matrix.shape
    if n < MIN_ROWS:
        logger.warning("few_observations", n=n, recommended=MIN_ROWS)
    families = learner_families(cfg.families, matrix)

    remaining = set(range(p))
    cond: set[int] = set()
    layers: list[frozenset[int]] = []
    table = RatioTable()
    epsilons: list[float] = []
    fallbacks: list[bool] = []
    forced: list[frozenset[int]] = []
    reports: list[StabilityReport | None] = []

    t = 0
    while remaining:
        step = ratios_for_candidates(
            remaining, cond, matrix, families, cv_config=cfg.cv, seed=cfg.seed, step=t, n_jobs=cfg.n_jobs
        )
        table.append(step)
        report: StabilityReport | None = None
        fallback = False
        epsilon = cfg.epsilon_for(t) if cfg.epsilon_mode == "fixed" else cfg.epsilon_grid[0]

        if len(remaining) == 1:
            layer = frozenset(remaining)
            forced_now = layer
        else:
            if step.failures:
                node = min(step.failures)
                raise LayerLearningError(f"step {t}: node {node + 1}: {step.failures[node]}", step=t, node=node)
            forced_now = step.degenerate
            if step.ratios:
                if cfg.epsilon_mode == "stability":
                    report = run_stability(
                        cfg.epsilon_grid,
                        remaining,
                        cond,
                        matrix,
                        families,
                        cfg.stability_splits,
                        cfg.stability_c,
                        stream_rng(cfg.seed, STREAM_STABILITY, t),
                        cv_config=cfg.cv,
                        step=t,
                        n_jobs=cfg.n_jobs,
                    )
                    epsilon = report.chosen_epsilon
                selected, fallback = assign_layer(step.ratios, epsilon)
                layer = selected | step.degenerate
            else:
                layer = step.degenerate

        logger.info(
            "layer_assigned",
            step=t,
            nodes=sorted(v + 1 for v in layer),
            epsilon=epsilon,
            fallback=fallback,
            forced=sorted(v + 1 for v in forced_now),
        )
        layers.append(layer)
        epsilons.append(float(epsilon))
        fallbacks.append(fallback)
        forced.append(frozenset(forced_now))
        reports.append(report)
        remaining -= layer
        cond |= layer
        t += 1

    return LayerResult(
        layers=TopologicalLayers(layers=tuple(layers)),
        ratio_table=table,
        epsilons_used=epsilons,
        fallback_flags=fallbacks,
        forced=forced,
        stability=reports,
    )
