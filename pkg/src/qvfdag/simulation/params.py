"""Parameter ranges, built-in presets, and parameter draws for simulated DAGs."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, model_validator

from qvfdag.common.errors import MissingRangeError
from qvfdag.families import QvfFamily
from qvfdag.graph import Dag

GraphKind = Literal["hub", "er", "ba", "custom", "toy"]


class ParamRange(BaseModel):
    """Closed interval [low, high] for uniform draws."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    low: float
    high: float

    @model_validator(mode="after")
    def _ordered(self) -> ParamRange:
        if self.low > self.high:
            raise ValueError(f"range lower bound {self.low} exceeds upper bound {self.high}")
        return self

    def draw(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(self.low, self.high))


class ComponentRanges(BaseModel):
    """Intercept and edge-weight ranges for one family component."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    intercept: ParamRange
    weight: ParamRange


def _cr(intercept: tuple[float, float], weight: tuple[float, float]) -> ComponentRanges:
    return ComponentRanges(
        intercept=ParamRange(low=intercept[0], high=intercept[1]),
        weight=ParamRange(low=weight[0], high=weight[1]),
    )


@dataclass(frozen=True)
class Preset:
    """A named simulation regime; ``ranges`` and ``edge_prob`` are keyed by p (None = any p)."""

    name: str
    graph_kind: GraphKind
    family: QvfFamily
    learner_family: QvfFamily
    ranges: dict[int | None, tuple[ComponentRanges, ...]]
    edge_prob: dict[int | None, float] | None = None
    attach: int | None = None
    edges: tuple[tuple[int, int], ...] | None = None
    fixed_p: int | None = None

    def ranges_for(self, p: int) -> tuple[ComponentRanges, ...]:
        if p in self.ranges:
            return self.ranges[p]
        if None in self.ranges:
            return self.ranges[None]
        raise MissingRangeError(
            f"preset {self.name} has parameter ranges only for p in {sorted(k for k in self.ranges if k is not None)}"
        )

    def edge_prob_for(self, p: int) -> float | None:
        if self.edge_prob is None:
            return None
        if p in self.edge_prob:
            return self.edge_prob[p]
        if None in self.edge_prob:
            return self.edge_prob[None]
        raise MissingRangeError(f"preset {self.name} has no edge probability for p={p}")


_POISSON = QvfFamily.poisson()
_MIXED = QvfFamily.mixture(QvfFamily.poisson(), QvfFamily.binomial(4))

PRESETS: dict[str, Preset] = {
    "example1": Preset(
        name="example1",
        graph_kind="hub",
        family=_POISSON,
        learner_family=_POISSON,
        ranges={None: (_cr((1.0, 3.0), (0.1, 0.5)),)},
    ),
    # Mixture components are (Poisson, Binomial(4)).
    "example2": Preset(
        name="example2",
        graph_kind="hub",
        family=_MIXED,
        learner_family=_POISSON,
        ranges={
            5: (_cr((1.0, 3.0), (0.1, 0.3)), _cr((0.1, 0.2), (0.1, 0.2))),
            20: (_cr((1.0, 3.0), (0.1, 0.2)), _cr((0.1, 0.2), (0.1, 0.2))),
            100: (_cr((1.0, 3.0), (0.05, 0.2)), _cr((0.05, 0.2), (0.05, 0.2))),
        },
    ),
    "example3": Preset(
        name="example3",
        graph_kind="er",
        family=_MIXED,
        learner_family=_POISSON,
        ranges={
            5: (_cr((1.0, 3.0), (0.01, 0.05)), _cr((0.01, 0.05), (0.01, 0.05))),
            20: (_cr((1.0, 3.0), (0.005, 0.015)), _cr((0.005, 0.015), (0.005, 0.015))),
            100: (_cr((1.0, 3.0), (0.001, 0.01)), _cr((0.005, 0.01), (0.005, 0.01))),
        },
        edge_prob={5: 0.35, 20: 0.35, 100: 0.1},
    ),
    "example4": Preset(
        name="example4",
        graph_kind="ba",
        family=_MIXED,
        learner_family=_POISSON,
        ranges={
            5: (_cr((1.0, 3.0), (0.01, 0.03)), _cr((0.01, 0.05), (0.01, 0.05))),
            20: (_cr((1.0, 3.0), (0.005, 0.02)), _cr((0.005, 0.02), (0.005, 0.02))),
            100: (_cr((1.0, 3.0), (0.001, 0.01)), _cr((0.001, 0.01), (0.001, 0.01))),
        },
        attach=2,
    ),
    # Three layers: 1 -> 2 -> 3 plus isolated 4.
    "toy": Preset(
        name="toy",
        graph_kind="toy",
        family=_POISSON,
        learner_family=_POISSON,
        ranges={None: (_cr((0.5, 1.0), (0.2, 0.3)),)},
        edges=((0, 1), (1, 2)),
        fixed_p=4,
    ),
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise MissingRangeError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


@dataclass(frozen=True)
class SimParams:
    """Per-component intercepts (p x C) and edge weights ``(k, j) -> (C,)``."""

    intercepts: NDArray[np.float64]
    weights: dict[tuple[int, int], NDArray[np.float64]]

    @property
    def components(self) -> int:
        return int(self.intercepts.shape[1])

    def eta(self, dag: Dag, j: int, data: NDArray[np.float64], component: int) -> NDArray[np.float64]:
        eta = np.full(data.shape[0], self.intercepts[j, component])
        for k in sorted(dag.parents(j)):
            eta = eta + self.weights[(k, j)][component] * data[:, k]
        return eta

    def to_json(self) -> dict:
        p = self.intercepts.shape[0]
        nodes = []
        for j in range(p):
            incoming = {str(k + 1): w.tolist() for (k, jj), w in sorted(self.weights.items()) if jj == j}
            nodes.append({"node": j + 1, "intercept": self.intercepts[j].tolist(), "weights": incoming})
        return {"components": self.components, "nodes": nodes}


def draw_params(dag: Dag, ranges: Sequence[ComponentRanges], rng: np.random.Generator) -> SimParams:
    """Uniform draws in node order; per node and component: intercept, then weights of sorted parents."""
    if not ranges:
        raise MissingRangeError("no parameter ranges supplied")
    C = len(ranges)
    intercepts = np.zeros((dag.p, C))
    weights: dict[tuple[int, int], NDArray[np.float64]] = {
        (k, j): np.zeros(C) for j in range(dag.p) for k in dag.parents(j)
    }
    for j in range(dag.p):
        parents = sorted(dag.parents(j))
        for c, comp in enumerate(ranges):
            intercepts[j, c] = comp.intercept.draw(rng)
            for k in parents:
                weights[(k, j)][c] = comp.weight.draw(rng)
    return SimParams(intercepts=intercepts, weights=weights)
