"""Simulation specs and the one-call ``simulate`` entry point."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from qvfdag.common.errors import MissingRangeError
from qvfdag.common.utils import STREAM_SIMULATION, stream_rng
from qvfdag.families import FamilyKind, QvfFamily
from qvfdag.graph import Dag
from qvfdag.simulation.graphs import gen_ba, gen_er, gen_hub
from qvfdag.simulation.params import ComponentRanges, GraphKind, SimParams, draw_params, get_preset
from qvfdag.simulation.sampler import sample_data


class SimSpec(BaseModel):
    """Everything needed to regenerate one simulated data set."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    graph_kind: GraphKind
    p: int = Field(ge=1)
    n: int = Field(ge=1)
    family: QvfFamily
    learner_family: QvfFamily = Field(default_factory=QvfFamily.poisson)
    ranges: tuple[ComponentRanges, ...]
    edge_prob: float | None = None
    attach: int | None = None
    # 0-based edges for custom and toy graphs.
    edges: tuple[tuple[int, int], ...] | None = None
    seed: int = 0
    preset: str | None = None

    @model_validator(mode="after")
    def _check(self) -> SimSpec:
        expected = 2 if self.family.kind is FamilyKind.MIXTURE else 1
        if len(self.ranges) != expected:
            raise ValueError(f"{self.family.label()} needs {expected} parameter range set(s), got {len(self.ranges)}")
        if self.graph_kind == "er" and (self.edge_prob is None or not 0.0 < self.edge_prob < 1.0):
            raise ValueError("er graphs need an edge probability in (0, 1)")
        if self.graph_kind == "ba" and (self.attach is None or self.attach < 1 or self.p <= self.attach):
            raise ValueError("ba graphs need 1 <= attach < p")
        if self.graph_kind in ("custom", "toy") and self.edges is None:
            raise ValueError(f"{self.graph_kind} graphs need an explicit edge list")
        if self.graph_kind in ("hub", "er") and self.p < 2:
            raise ValueError(f"{self.graph_kind} graphs need p >= 2")
        return self

    @classmethod
    def from_preset(cls, name: str, *, p: int | None = None, n: int, seed: int = 0) -> SimSpec:
        preset = get_preset(name)
        size = preset.fixed_p if preset.fixed_p is not None else p
        if size is None:
            raise MissingRangeError(f"preset {name} needs p")
        if preset.fixed_p is not None and p is not None and p != preset.fixed_p:
            raise MissingRangeError(f"preset {name} has a fixed p={preset.fixed_p}")
        return cls(
            graph_kind=preset.graph_kind,
            p=size,
            n=n,
            family=preset.family,
            learner_family=preset.learner_family,
            ranges=preset.ranges_for(size),
            edge_prob=preset.edge_prob_for(size),
            attach=preset.attach,
            edges=preset.edges,
            seed=seed,
            preset=name,
        )

    def build_graph(self, rng: np.random.Generator) -> Dag:
        match self.graph_kind:
            case "hub":
                return gen_hub(self.p)
            case "er":
                assert self.edge_prob is not None
                return gen_er(self.p, self.edge_prob, rng)
            case "ba":
                assert self.attach is not None
                return gen_ba(self.p, self.attach, rng)
            case _:
                return Dag.from_edges(self.p, self.edges or ())


@dataclass(frozen=True)
class SimulationResult:
    spec: SimSpec
    dag: Dag
    params: SimParams
    data: NDArray[np.float64]

    def metadata(self) -> dict:
        return {
            "spec": self.spec.model_dump(mode="json"),
            "seed": self.spec.seed,
            "params": self.params.to_json(),
        }


def simulate(spec: SimSpec) -> SimulationResult:
    """Graph, parameters, and data from three independent streams of ``spec.seed``."""
    dag = spec.build_graph(stream_rng(spec.seed, STREAM_SIMULATION, 0))
    params = draw_params(dag, spec.ranges, stream_rng(spec.seed, STREAM_SIMULATION, 1))
    families = [spec.family] * spec.p
    data = sample_data(dag, params, families, spec.n, stream_rng(spec.seed, STREAM_SIMULATION, 2))
    return SimulationResult(spec=spec, dag=dag, params=params, data=data)
