from qvfdag.simulation.graphs import gen_ba, gen_er, gen_hub
from qvfdag.simulation.params import (
    PRESETS,
    ComponentRanges,
    ParamRange,
    Preset,
    SimParams,
    draw_params,
    get_preset,
)
from qvfdag.simulation.sampler import sample_data
from qvfdag.simulation.spec import SimSpec, SimulationResult, simulate

__all__ = [
    "PRESETS",
    "ComponentRanges",
    "ParamRange",
    "Preset",
    "SimParams",
    "SimSpec",
    "SimulationResult",
    "draw_params",
    "gen_ba",
    "gen_er",
    "gen_hub",
    "get_preset",
    "sample_data",
    "simulate",
]
