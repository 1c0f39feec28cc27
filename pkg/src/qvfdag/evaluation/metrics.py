"""Edge-level comparison of an estimated DAG against the truth."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Literal

from qvfdag.common.errors import DimensionMismatchError
from qvfdag.graph import Dag

HmNormalization = Literal["skeleton", "ordered"]


@dataclass(frozen=True)
class Metrics:
    hm: float
    recall: float
    precision: float
    f1: float
    tp: int
    fp: int
    fn: int
    flips: int
    insertions: int
    deletions: int

    def to_json(self) -> dict:
        return asdict(self)


def hm_divisor(p: int, normalization: HmNormalization = "skeleton") -> int:
    """p(p-1)/2 node pairs for ``skeleton``, p(p-1) ordered pairs for ``ordered``."""
    pairs = p * (p - 1)
    return pairs if normalization == "ordered" else pairs // 2


def structural_metrics(estimated: Dag, truth: Dag, *, normalization: HmNormalization = "skeleton") -> Metrics:
    """Precision, recall, F1, and normalized Hamming distance.

    A truth edge estimated with the opposite direction is one flip: it is not a
    true positive and counts once in the Hamming distance.
    """
    if estimated.p != truth.p:
        raise DimensionMismatchError(f"graphs have different node counts: {estimated.p} vs {truth.p}")
    est, tru = estimated.edges, truth.edges
    tp = len(est & tru)
    flips = sum(1 for k, j in tru if (j, k) in est and (k, j) not in est)
    insertions = sum(1 for k, j in est if (k, j) not in tru and (j, k) not in tru)
    deletions = sum(1 for k, j in tru if (k, j) not in est and (j, k) not in est)

    if est:
        precision = tp / len(est)
    else:
        precision = 1.0 if not tru else 0.0
    recall = tp / len(tru) if tru else 1.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    divisor = hm_divisor(truth.p, normalization)
    hm = (insertions + deletions + flips) / divisor if divisor else 0.0
    return Metrics(
        hm=hm,
        recall=recall,
        precision=precision,
        f1=f1,
        tp=tp,
        fp=len(est) - tp,
        fn=len(tru) - tp,
        flips=flips,
        insertions=insertions,
        deletions=deletions,
    )
