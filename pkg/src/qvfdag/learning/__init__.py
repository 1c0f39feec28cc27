from qvfdag.learning.edges import EdgeResult, ParentFit, dense_baseline, recover_all, recover_parents
from qvfdag.learning.layers import LayerLearnConfig, LayerResult, default_epsilon_grid, reconstruct_layers
from qvfdag.learning.pipeline import LearnResult, learn_structure
from qvfdag.learning.ratio import (
    RatioStep,
    RatioTable,
    conditional_ratio,
    ratios_for_candidates,
    unconditional_ratio,
)
from qvfdag.learning.stability import (
    StabilityReport,
    choose_epsilon,
    cohen_kappa,
    run_stability,
    select_epsilon,
    stability_score,
)
from qvfdag.learning.thresholds import assign_layer

__all__ = [
    "EdgeResult",
    "LayerLearnConfig",
    "LayerResult",
    "LearnResult",
    "ParentFit",
    "RatioStep",
    "RatioTable",
    "StabilityReport",
    "assign_layer",
    "choose_epsilon",
    "cohen_kappa",
    "conditional_ratio",
    "default_epsilon_grid",
    "dense_baseline",
    "learn_structure",
    "ratios_for_candidates",
    "reconstruct_layers",
    "recover_all",
    "recover_parents",
    "run_stability",
    "select_epsilon",
    "stability_score",
    "unconditional_ratio",
]
