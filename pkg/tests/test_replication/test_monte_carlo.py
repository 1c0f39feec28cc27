"""Seeded Monte-Carlo replications of the published simulation regimes.

Every class here is marked ``slow``; run with ``pytest -m slow``.
"""

import statistics
import time

import pandas as pd
import pytest

from qvfdag.cli.bench import BenchTask, run_replication
from qvfdag.families import QvfFamily
from qvfdag.learning import LayerLearnConfig, conditional_ratio, learn_structure, unconditional_ratio
from qvfdag.simulation import SimSpec, simulate

REPS = 50


def replicate(preset: str, p: int, n: int, reps: int = REPS) -> pd.DataFrame:
    """Bench rows (TLDAG and dense baseline) for ``reps`` seeded replications."""
    rows = []
    for rep in range(reps):
        task = BenchTask(
            preset=preset,
            p=p,
            n=n,
            rep=rep,
            seed=rep,
            learn=LayerLearnConfig(),
            hm_normalization="skeleton",
            log_level="WARNING",
            log_format="json",
            run_id="replication",
        )
        rows.extend(run_replication(task))
    runs = pd.DataFrame(rows)
    assert (runs["status"] == "ok").all(), runs.loc[runs["status"] != "ok", "error"].tolist()
    return runs


def method_means(runs: pd.DataFrame, method: str) -> pd.Series:
    return runs[runs["method"] == method][["recall", "precision", "f1", "hm"]].mean()


@pytest.mark.slow
class TestPoissonHubTable:
    def test_p5_n200(self):
        """Example 1 at p = 5: recall near 1, precision and F1 near the published row."""
        means = method_means(replicate("example1", 5, 200), "tldag")
        assert means["recall"] >= 0.95
        assert 0.50 <= means["precision"] <= 0.78
        assert 0.65 <= means["f1"] <= 0.85
        assert means["hm"] <= 0.20

    def test_p20_n200(self):
        """Example 1 at p = 20 keeps recall near 1 and precision above 0.4."""
        means = method_means(replicate("example1", 20, 200), "tldag")
        assert means["recall"] >= 0.95
        assert means["precision"] >= 0.40


@pytest.mark.slow
class TestRatioCriterionAtScale:
    def test_root_child_and_conditioned_child(self):
        """On n = 20000 hub data the root and the conditioned child score 1, the bare child above 1."""
        family = QvfFamily.poisson()
        root_ok = child_ok = conditioned_ok = 0
        for seed in range(REPS):
            data = simulate(SimSpec.from_preset("example1", p=5, n=20000, seed=seed)).data
            root_ok += abs(unconditional_ratio(data[:, 0], family) - 1.0) < 0.05
            child_ok += unconditional_ratio(data[:, 1], family) > 1.05
            conditioned_ok += abs(conditional_ratio(1, {0}, data, family) - 1.0) < 0.05
        assert root_ok >= 49
        assert child_ok >= 49
        assert conditioned_ok >= 49


@pytest.mark.slow
class TestToyGraphExactness:
    def test_layers_and_edges(self):
        """The four-node toy graph is recovered exactly in at least 45 of 50 runs."""
        exact = 0
        for seed in range(REPS):
            sim = simulate(SimSpec.from_preset("toy", n=20000, seed=seed))
            config = LayerLearnConfig(seed=seed, families=(sim.spec.learner_family,) * sim.spec.p)
            result = learn_structure(sim.data, config)
            layers_match = result.layer_result.layers.to_json() == [[1, 4], [2], [3]]
            exact += layers_match and result.dag == sim.dag
        assert exact >= 45


@pytest.mark.slow
class TestRuntimeGrowth:
    @staticmethod
    def _median_seconds(p: int) -> float:
        sim = simulate(SimSpec.from_preset("example1", p=p, n=400, seed=11))
        config = LayerLearnConfig(seed=11, families=(QvfFamily.poisson(),) * p)
        learn_structure(sim.data, config)  # warm-up
        seconds = []
        for _ in range(3):
            start = time.perf_counter()
            learn_structure(sim.data, config)
            seconds.append(time.perf_counter() - start)
        return statistics.median(seconds)

    def test_doubling_p_less_than_triples_time(self):
        """Hub graphs at n = 400: going from p = 50 to p = 100 costs under 3x."""
        assert self._median_seconds(100) / self._median_seconds(50) < 3.0


@pytest.mark.slow
class TestMixedGraphsAgainstDenseBaseline:
    @pytest.mark.parametrize("preset", ["example2", "example3", "example4"])
    def test_precision_not_below_dense(self, preset):
        """Pruning with the lasso never loses precision against keeping every upper-layer edge."""
        runs = replicate(preset, 5, 500)
        assert method_means(runs, "tldag")["precision"] >= method_means(runs, "dense")["precision"]
