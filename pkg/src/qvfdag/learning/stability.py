"""Stability-based choice of the layer threshold epsilon.

The sample is split in half ``B`` times. For every candidate epsilon each half
selects a layer by thresholding its own ratios; Cohen's kappa between the two
selections, averaged over the splits, scores that epsilon. The chosen epsilon
is the smallest one whose score reaches ``c`` times the best score.
"""

from __future__ import annotations

import math
from collections.abc import Collection, Sequence
from dataclasses import dataclass

import numpy as np
import structlog
from numpy.typing import NDArray

from qvfdag.common.errors import GlmInputError
from qvfdag.families import QvfFamily
from qvfdag.glm import CvConfig
from qvfdag.learning.ratio import RatioStep, ratios_for_candidates
from qvfdag.learning.thresholds import assign_layer

logger = structlog.get_logger()


def cohen_kappa(set_a: Collection[int], set_b: Collection[int], universe: int | Collection[int]) -> float:
    """Agreement between two selections of the same universe, corrected for chance.

    ``universe`` is either its size ``p_n`` (elements ``0..p_n-1``) or the
    universe itself. When chance agreement is certain (both sets empty or both
    full) the result is 1 for identical sets and 0 otherwise.
    """
    members = set(range(universe)) if isinstance(universe, int) else set(universe)
    p_n = len(members)
    if p_n < 1:
        raise ValueError("universe must contain at least one element")
    a, b = set(set_a), set(set_b)
    outside = (a | b) - members
    if outside:
        raise ValueError(f"element(s) {sorted(outside)} outside the universe")

    n11 = len(a & b)
    n12 = len(a - b)
    n21 = len(b - a)
    n22 = p_n - n11 - n12 - n21
    # Integer form of Pr(e) * p_n**2 so the Pr(e) = 1 test is exact.
    expected = (n11 + n12) * (n11 + n21) + (n12 + n22) * (n21 + n22)
    if expected == p_n * p_n:
        return 1.0 if a == b else 0.0
    pr_a = (n11 + n22) / p_n
    pr_e = expected / (p_n * p_n)
    return (pr_a - pr_e) / (1.0 - pr_e)


def half_split(n: int, rng: np.random.Generator) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    """Shuffle row indices and cut them in two; the first half takes the extra row when n is odd."""
    perm = rng.permutation(n)
    cut = math.ceil(n / 2)
    return np.sort(perm[:cut]), np.sort(perm[cut:])


@dataclass(frozen=True)
class SplitRatios:
    """Ratios from the two halves of one split, or the reason the split failed."""

    seed: int
    first: RatioStep | None = None
    second: RatioStep | None = None
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


def _select(step: RatioStep, epsilon: float) -> frozenset[int]:
    # Degenerate columns of a half are forced into the layer, as on the full sample.
    if not step.ratios:
        return step.degenerate
    chosen, _ = assign_layer(step.ratios, epsilon)
    return chosen | step.degenerate


def compute_split_ratios(
    candidates: Collection[int],
    cond_set: Collection[int],
    data: NDArray[np.float64],
    families: Sequence[QvfFamily],
    splits: int,
    rng: np.random.Generator,
    *,
    cv_config: CvConfig | None = None,
    step: int = 0,
    n_jobs: int = 1,
) -> list[SplitRatios]:
    """Draw ``splits`` half-splits and compute every candidate's ratio on both halves.

    The conditioning set stays the full-sample one. Ratios do not depend on
    epsilon, so one computation serves every grid point.
    """
    n = data.shape[0]
    if n < 4:
        raise GlmInputError(f"stability selection needs at least 4 rows, got {n}")
    seeds = [int(s) for s in rng.integers(0, 2**32, size=splits)]
    out: list[SplitRatios] = []
    for b, seed in enumerate(seeds):
        first_rows, second_rows = half_split(n, np.random.default_rng(seed))
        halves = []
        for rows in (first_rows, second_rows):
            halves.append(
                ratios_for_candidates(
                    candidates, cond_set, data[rows], families, cv_config=cv_config, seed=seed, step=step, n_jobs=n_jobs
                )
            )
        failures = {**halves[0].failures, **halves[1].failures}
        if failures:
            node = min(failures)
            logger.warning("stability_split_failed", split=b, step=step, node=node + 1, error=failures[node])
            out.append(SplitRatios(seed=seed, error=f"node {node + 1}: {failures[node]}"))
        else:
            out.append(SplitRatios(seed=seed, first=halves[0], second=halves[1]))
    return out


def score_from_splits(epsilon: float, splits: Sequence[SplitRatios], candidates: Collection[int]) -> float:
    """Mean kappa over splits at one epsilon; a failed split contributes 0."""
    if not splits:
        raise ValueError("at least one split is required")
    total = 0.0
    for split in splits:
        if split.failed or split.first is None or split.second is None:
            continue
        total += cohen_kappa(_select(split.first, epsilon), _select(split.second, epsilon), candidates)
    return total / len(splits)


def stability_score(
    epsilon: float,
    candidates: Collection[int],
    cond_set: Collection[int],
    data: NDArray[np.float64],
    families: Sequence[QvfFamily],
    splits: int,
    rng: np.random.Generator,
    *,
    cv_config: CvConfig | None = None,
    n_jobs: int = 1,
) -> float:
    """Average kappa of the two halves' layer selections at a single epsilon."""
    if not candidates:
        raise ValueError("candidates must be nonempty")
    computed = compute_split_ratios(
        candidates, cond_set, data, families, splits, rng, cv_config=cv_config, n_jobs=n_jobs
    )
    return score_from_splits(epsilon, computed, candidates)


def choose_epsilon(grid: Sequence[float], scores: Sequence[float], c: float) -> tuple[float, bool]:
    """Smallest grid epsilon whose score is at least ``c`` times the best.

    Returns ``(epsilon, fallback)``; when the best score is not positive the
    rule is undefined and the argmax (smallest epsilon on ties) is returned
    with ``fallback=True``.
    """
    values = [float(s) for s in scores]
    if not grid or len(grid) != len(values):
        raise ValueError("grid and scores must be nonempty and the same length")
    best = max(values)
    if best <= 0.0:
        return float(grid[values.index(best)]), True
    for eps, score in zip(grid, values, strict=True):
        if score / best >= c:
            return float(eps), False
    raise AssertionError("the maximum always passes its own threshold")


@dataclass(frozen=True)
class StabilityReport:
    grid: tuple[float, ...]
    scores: tuple[float, ...]
    chosen_epsilon: float
    split_seeds: tuple[int, ...]
    universe_size: int
    fallback: bool = False
    failed_splits: tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {
            "grid": list(self.grid),
            "scores": list(self.scores),
            "chosen_epsilon": self.chosen_epsilon,
            "split_seeds": list(self.split_seeds),
            "universe_size": self.universe_size,
            "fallback": self.fallback,
            "failed_splits": list(self.failed_splits),
        }


def run_stability(
    grid: Sequence[float],
    candidates: Collection[int],
    cond_set: Collection[int],
    data: NDArray[np.float64],
    families: Sequence[QvfFamily],
    splits: int,
    c: float,
    rng: np.random.Generator,
    *,
    cv_config: CvConfig | None = None,
    step: int = 0,
    n_jobs: int = 1,
) -> StabilityReport:
    """Score every grid epsilon from one set of split ratios and apply :func:`choose_epsilon`."""
    if not grid:
        raise ValueError("epsilon grid must be nonempty")
    if not 0.0 < c < 1.0:
        raise ValueError(f"c must lie in (0, 1), got {c}")
    computed = compute_split_ratios(
        candidates, cond_set, data, families, splits, rng, cv_config=cv_config, step=step, n_jobs=n_jobs
    )
    scores = [score_from_splits(eps, computed, candidates) for eps in grid]
    chosen, fallback = choose_epsilon(list(grid), scores, c)
    if fallback:
        logger.warning("stability_fallback", step=step, best_score=max(scores), epsilon=chosen)
    return StabilityReport(
        grid=tuple(float(g) for g in grid),
        scores=tuple(scores),
        chosen_epsilon=chosen,
        split_seeds=tuple(s.seed for s in computed),
        universe_size=len(candidates),
        fallback=fallback,
        failed_splits=tuple(b for b, s in enumerate(computed) if s.failed),
    )


def select_epsilon(
    grid: Sequence[float],
    candidates: Collection[int],
    cond_set: Collection[int],
    data: NDArray[np.float64],
    families: Sequence[QvfFamily],
    splits: int,
    c: float,
    rng: np.random.Generator,
    *,
    cv_config: CvConfig | None = None,
    n_jobs: int = 1,
) -> float:
    return run_stability(
        grid, candidates, cond_set, data, families, splits, c, rng, cv_config=cv_config, n_jobs=n_jobs
    ).chosen_epsilon
