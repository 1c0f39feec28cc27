"""Ancestral sampling from a QVF-DAG."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray

from qvfdag.common.errors import DimensionMismatchError
from qvfdag.families import FamilyKind, QvfFamily
from qvfdag.graph import Dag
from qvfdag.simulation.params import SimParams


def sample_data(
    dag: Dag, params: SimParams, families: Sequence[QvfFamily], n: int, rng: np.random.Generator
) -> NDArray[np.float64]:
    """Draw an n x p matrix node by node in topological order.

    Node j uses ``eta = theta_j + sum_k theta_jk * x_k`` over its parents; a
    mixture node gets one predictor per component and mixes per observation.
    """
    if len(families) != dag.p or params.intercepts.shape[0] != dag.p:
        raise DimensionMismatchError(f"need {dag.p} families and parameter rows")
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    data = np.zeros((n, dag.p))
    for j in dag.topological_order():
        family = families[j]
        if family.kind is FamilyKind.MIXTURE:
            if params.components != 2:
                raise DimensionMismatchError(f"node {j + 1}: mixture needs 2 parameter components")
            eta: object = (params.eta(dag, j, data, 0), params.eta(dag, j, data, 1))
        else:
            eta = params.eta(dag, j, data, 0)
        data[:, j] = np.asarray(family.sample(eta, rng), dtype=np.float64).reshape(n)
    return data
