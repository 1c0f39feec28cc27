"""End-to-end structure learning: layers first, then parents."""

from __future__ import annotations

from dataclasses import dataclass

import structlog
from numpy.typing import ArrayLike

from qvfdag.common.logging import PhaseTimer
from qvfdag.graph import Dag
from qvfdag.learning.edges import EdgeResult, recover_all
from qvfdag.learning.layers import LayerLearnConfig, LayerResult, learner_families, prepare_data, reconstruct_layers

logger = structlog.get_logger()


@dataclass
class LearnResult:
    layer_result: LayerResult
    edge_result: EdgeResult
    timer: PhaseTimer

    @property
    def dag(self) -> Dag:
        return self.edge_result.dag

    def diagnostics(self, *, include_timing: bool = True) -> dict:
        out: dict = {
            **self.layer_result.to_json(),
            "edge_failures": {str(j + 1): m for j, m in sorted(self.edge_result.failures.items())},
        }
        if include_timing:
            out["timing"] = self.timer.as_dict()
        return out


def learn_structure(data: ArrayLike, config: LayerLearnConfig | None = None, *, timer: PhaseTimer | None = None) -> LearnResult:
    cfg = config or LayerLearnConfig()
    timer = timer or PhaseTimer()
    matrix = prepare_data(data)
    families = learner_families(cfg.families, matrix)
    cfg = cfg.model_copy(update={"families": tuple(families)})
    with timer.phase("layers", p=matrix.shape[1], n=matrix.shape[0]):
        layer_result = reconstruct_layers(matrix, cfg)
    with timer.phase("edges"):
        edge_result = recover_all(layer_result.layers, matrix, families, cfg.cv, seed=cfg.seed, n_jobs=cfg.n_jobs)
    logger.info(
        "structure_learned",
        layers=layer_result.layers.T,
        edges=len(edge_result.dag.edges),
        edge_failures=len(edge_result.failures),
    )
    return LearnResult(layer_result=layer_result, edge_result=edge_result, timer=timer)
