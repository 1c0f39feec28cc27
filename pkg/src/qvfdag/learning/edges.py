"""Parent recovery by cross-validated l1 GLM regression on upper layers."""

from __future__ import annotations

from collections.abc import Collection, Sequence
from dataclasses import dataclass, field

import numpy as np
import structlog
from numpy.typing import NDArray

from qvfdag.common.errors import LayerOrderError, QvfDagError
from qvfdag.common.utils import STREAM_EDGES, parallel_map, stream_rng
from qvfdag.families import QvfFamily
from qvfdag.glm import CvConfig, cv_select_lambda, fit_at_chosen
from qvfdag.graph import Dag, TopologicalLayers

logger = structlog.get_logger()


@dataclass(frozen=True)
class ParentFit:
    node: int
    parents: frozenset[int] = frozenset()
    coefficients: dict[int, float] = field(default_factory=dict)
    intercept: float | None = None
    chosen_lambda: float | None = None
    converged: bool = True
    degenerate: bool = False
    diagnostic: str | None = None

    def to_json(self) -> dict:
        return {
            "node": self.node + 1,
            "parents": sorted(k + 1 for k in self.parents),
            "intercept": self.intercept,
            "coefficients": {str(k + 1): v for k, v in sorted(self.coefficients.items())},
            "chosen_lambda": self.chosen_lambda,
            "converged": self.converged,
            "degenerate": self.degenerate,
            "diagnostic": self.diagnostic,
        }


def recover_parents(
    j: int,
    upper: Collection[int],
    data: NDArray[np.float64],
    family: QvfFamily,
    cv_config: CvConfig | None = None,
    rng: np.random.Generator | None = None,
) -> ParentFit:
    """Regress ``X_j`` on every upper-layer node; parents are the exact nonzeros at the CV lambda.

    Layer-0 nodes (empty ``upper``) are skipped. A non-converged fit yields no
    parents and a diagnostic.
    """
    if j in upper:
        raise ValueError(f"node {j + 1} cannot be its own upper-layer candidate")
    if not upper:
        return ParentFit(node=j)
    cols = sorted(upper)
    y = data[:, j]
    X = data[:, cols]
    report = cv_select_lambda(y, X, family, cv_config, rng)
    fit = fit_at_chosen(y, X, family, report, cv_config)
    if not fit.converged:
        logger.warning("parent_fit_not_converged", node=j + 1, lam=report.chosen_lambda)
        return ParentFit(
            node=j,
            chosen_lambda=report.chosen_lambda,
            converged=False,
            degenerate=report.degenerate,
            diagnostic="glm did not converge at the chosen lambda",
        )
    coefs = {cols[k]: float(fit.predictor.coefficients[k]) for k in fit.nonzero}
    return ParentFit(
        node=j,
        parents=frozenset(coefs),
        coefficients=coefs,
        intercept=fit.predictor.intercept,
        chosen_lambda=report.chosen_lambda,
        degenerate=report.degenerate,
    )


@dataclass
class EdgeResult:
    dag: Dag
    layers: TopologicalLayers
    fits: dict[int, ParentFit] = field(default_factory=dict)
    failures: dict[int, str] = field(default_factory=dict)

    def coefficients_json(self) -> dict:
        return {
            "nodes": [self.fits[j].to_json() for j in sorted(self.fits)],
            "failures": {str(j + 1): msg for j, msg in sorted(self.failures.items())},
        }


def check_layer_order(dag: Dag, layers: TopologicalLayers) -> None:
    index = layers.index
    for k, j in dag.sorted_edges():
        if index[k] >= index[j]:
            raise LayerOrderError(
                f"edge {k + 1}->{j + 1} goes from layer {index[k]} to layer {index[j]}", edge=(k, j)
            )


def recover_all(
    layers: TopologicalLayers,
    data: NDArray[np.float64],
    families: Sequence[QvfFamily],
    cv_config: CvConfig | None = None,
    *,
    seed: int = 0,
    n_jobs: int = 1,
) -> EdgeResult:
    """Run :func:`recover_parents` for every node below layer 0, concurrently.

    Per-node errors are collected and the run continues.
    """
    if layers.p != data.shape[1]:
        raise ValueError(f"layers cover {layers.p} nodes but the data has {data.shape[1]} columns")
    tasks = [(j, layers.upper(t)) for t in range(1, layers.T) for j in sorted(layers.layers[t])]

    def one(task: tuple[int, frozenset[int]]) -> tuple[int, ParentFit | None, str | None]:
        j, upper = task
        try:
            fit = recover_parents(j, upper, data, families[j], cv_config, stream_rng(seed, STREAM_EDGES, j))
            return j, fit, None
        except QvfDagError as exc:
            logger.warning("parent_recovery_failed", node=j + 1, error=str(exc))
            return j, None, str(exc)

    results = parallel_map(one, tasks, n_jobs=n_jobs)
    fits = {j: fit for j, fit, _ in results if fit is not None}
    failures = {j: err for j, _, err in results if err is not None}
    edges = [(k, j) for j, fit in sorted(fits.items()) for k in sorted(fit.parents)]
    dag = Dag.from_edges(data.shape[1], edges)
    check_layer_order(dag, layers)
    return EdgeResult(dag=dag, layers=layers, fits=fits, failures=failures)


def dense_baseline(layers: TopologicalLayers) -> Dag:
    """Every upper-layer node points to every node of each later layer."""
    edges = [(k, j) for t in range(1, layers.T) for j in layers.layers[t] for k in layers.upper(t)]
    return Dag.from_edges(layers.p, edges)
