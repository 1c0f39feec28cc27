"""Summary statistics over benchmark replications."""

from __future__ import annotations

import math
import statistics
from collections.abc import Sequence

import pandas as pd


def summarize(values: Sequence[float]) -> dict[str, float | str | None]:
    """Mean, standard error (NA for a single value), and a ``mean(se)`` table cell.

    Missing replications (None or NaN) are dropped first.
    """
    kept = [float(v) for v in values if v is not None and not math.isnan(float(v))]
    if not kept:
        return {"mean": None, "se": None, "n": 0, "cell": "NA"}
    mean = statistics.mean(kept)
    se = statistics.stdev(kept) / math.sqrt(len(kept)) if len(kept) > 1 else None
    cell = f"{mean:.2f}({'NA' if se is None else f'{se:.2f}'})"
    return {"mean": mean, "se": se, "n": len(kept), "cell": cell}


def summarize_frame(runs: pd.DataFrame, by: Sequence[str], metrics: Sequence[str]) -> pd.DataFrame:
    """One row per group with ``<metric>_mean``, ``<metric>_se`` and ``<metric>`` cell columns."""
    rows = []
    for key, group in runs.groupby(list(by), sort=True, dropna=False):
        keys = key if isinstance(key, tuple) else (key,)
        row: dict[str, object] = dict(zip(by, keys, strict=True))
        row["reps"] = len(group)
        for metric in metrics:
            s = summarize(group[metric].tolist())
            row[f"{metric}_mean"] = s["mean"]
            row[f"{metric}_se"] = s["se"]
            row[metric] = s["cell"]
        rows.append(row)
    return pd.DataFrame(rows)
