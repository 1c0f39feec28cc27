"""Tests for qvfdag.learning.pipeline: end-to-end structure learning."""

import pytest

from qvfdag.common.errors import DataError
from qvfdag.common.logging import PhaseTimer
from qvfdag.evaluation import structural_metrics
from qvfdag.learning import LayerLearnConfig, learn_structure
from qvfdag.simulation import simulate
from tests.conftest import CHAIN_EDGES, CHAIN_LAYERS, chain_spec


class TestLearnStructure:
    def test_chain(self, chain_sim, fixed_config):
        """Layers then edges recover the chain."""
        result = learn_structure(chain_sim.data, fixed_config)
        assert result.layer_result.layers.to_json() == CHAIN_LAYERS
        assert set(CHAIN_EDGES) <= result.dag.edges
        assert structural_metrics(result.dag, chain_sim.dag).recall == 1.0

    def test_phases_timed(self, chain_sim, fixed_config):
        """Layer and edge phases are timed in order."""
        timer = PhaseTimer()
        learn_structure(chain_sim.data, fixed_config, timer=timer)
        assert [p["phase"] for p in timer.phases] == ["layers", "edges"]

    def test_diagnostics(self, chain_sim, fixed_config):
        """Timing can be left out of the diagnostics."""
        result = learn_structure(chain_sim.data, fixed_config)
        with_timing = result.diagnostics()
        without = result.diagnostics(include_timing=False)
        assert set(with_timing["timing"]) == {"layers", "edges"}
        assert "timing" not in without
        assert without["edge_failures"] == {}
        assert without["layers"] == CHAIN_LAYERS

    def test_deterministic_across_thread_counts(self, chain_sim):
        """One and three workers give identical results."""
        base = {"epsilon_mode": "fixed", "epsilon": 0.2, "seed": 4}
        a = learn_structure(chain_sim.data, LayerLearnConfig(**base, n_jobs=1))
        b = learn_structure(chain_sim.data, LayerLearnConfig(**base, n_jobs=3))
        assert a.dag == b.dag
        assert a.diagnostics(include_timing=False) == b.diagnostics(include_timing=False)

    def test_stability_mode_runs(self):
        """Stability selection runs end to end on a small sample."""
        sim = simulate(chain_spec(n=800, seed=2))
        cfg = LayerLearnConfig(epsilon_grid=(0.05, 0.1, 0.2, 0.4), stability_splits=2)
        result = learn_structure(sim.data, cfg)
        assert result.layer_result.layers.p == 4

    def test_bad_data(self):
        """Empty input is a data error."""
        with pytest.raises(DataError):
            learn_structure([[]])


@pytest.mark.slow
class TestChainRecoveryMonteCarlo:
    def test_recall_over_replications(self):
        """Mean recall on ten chain replications stays at or above 0.9."""
        recalls = []
        for seed in range(10):
            sim = simulate(chain_spec(n=3000, seed=100 + seed))
            result = learn_structure(sim.data, LayerLearnConfig(epsilon_mode="fixed", epsilon=0.2, seed=seed))
            recalls.append(structural_metrics(result.dag, sim.dag).recall)
        assert sum(recalls) / len(recalls) >= 0.9
