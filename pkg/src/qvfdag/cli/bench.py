"""Seeded benchmark replications over preset cells."""

from __future__ import annotations

import math
from dataclasses import dataclass

import pandas as pd
import structlog

from qvfdag.common.errors import QvfDagError
from qvfdag.common.logging import PhaseTimer, configure_logging, set_run_id
from qvfdag.evaluation import HmNormalization, structural_metrics, summarize_frame
from qvfdag.learning import LayerLearnConfig, dense_baseline, learn_structure
from qvfdag.simulation import SimSpec, simulate

logger = structlog.get_logger()

METRIC_COLUMNS = ["hm", "recall", "precision", "f1"]
TIMING_COLUMNS = ["seconds_total", "seconds_layers", "seconds_edges"]
METHODS = ("tldag", "dense")


@dataclass(frozen=True)
class BenchTask:
    preset: str
    p: int
    n: int
    rep: int
    seed: int
    learn: LayerLearnConfig
    hm_normalization: HmNormalization
    log_level: str
    log_format: str
    run_id: str


def _failed_rows(task: BenchTask, error: str) -> list[dict]:
    base = {"preset": task.preset, "p": task.p, "n": task.n, "rep": task.rep, "seed": task.seed}
    blank = dict.fromkeys(METRIC_COLUMNS + TIMING_COLUMNS, math.nan)
    return [{**base, "method": m, "status": "failed", "error": error, **blank} for m in METHODS]


def run_replication(task: BenchTask) -> list[dict]:
    """Simulate one data set, learn it, and score TLDAG plus the dense-layer baseline.

    Runs inside a worker process, so logging is configured here. Failures
    produce NA rows instead of raising.
    """
    configure_logging(task.log_level, task.log_format)
    set_run_id(f"{task.run_id}-{task.preset}-p{task.p}-n{task.n}-r{task.rep}")
    try:
        timer = PhaseTimer()
        with timer.phase("simulate"):
            sim = simulate(SimSpec.from_preset(task.preset, p=task.p, n=task.n, seed=task.seed))
        config = task.learn.model_copy(update={"seed": task.seed, "families": (sim.spec.learner_family,) * sim.spec.p})
        result = learn_structure(sim.data, config, timer=timer)
    except QvfDagError as exc:
        logger.warning("bench_replication_failed", preset=task.preset, p=task.p, n=task.n, rep=task.rep, error=str(exc))
        return _failed_rows(task, str(exc))

    timing = {
        "seconds_total": timer.seconds("layers") + timer.seconds("edges"),
        "seconds_layers": timer.seconds("layers"),
        "seconds_edges": timer.seconds("edges"),
    }
    rows = []
    estimates = {"tldag": result.dag, "dense": dense_baseline(result.layer_result.layers)}
    for method in METHODS:
        m = structural_metrics(estimates[method], sim.dag, normalization=task.hm_normalization)
        rows.append(
            {
                "preset": task.preset,
                "p": task.p,
                "n": task.n,
                "rep": task.rep,
                "seed": task.seed,
                "method": method,
                "status": "ok",
                "error": "",
                "hm": m.hm,
                "recall": m.recall,
                "precision": m.precision,
                "f1": m.f1,
                "layers": result.layer_result.layers.T,
                "true_edges": len(sim.dag.edges),
                "estimated_edges": len(estimates[method].edges),
                **timing,
            }
        )
    return rows


def summarize_metrics(runs: pd.DataFrame) -> pd.DataFrame:
    return summarize_frame(runs, ["preset", "p", "n", "method"], METRIC_COLUMNS)


def summarize_timing(runs: pd.DataFrame) -> pd.DataFrame:
    tldag = runs[runs["method"] == "tldag"]
    return summarize_frame(tldag, ["preset", "p", "n"], TIMING_COLUMNS)
