"""Thresholding ratios into a layer."""

from __future__ import annotations

from collections.abc import Mapping


def assign_layer(ratios: Mapping[int, float], epsilon: float) -> tuple[frozenset[int], bool]:
    """Return ``({j : |R_j - 1| <= epsilon}, fallback)``.

    An empty selection falls back to the single node whose ratio is closest
    to 1 (smallest id on ties) and reports ``fallback=True``.
    """
    if not ratios:
        raise ValueError("ratios must be nonempty")
    selected = frozenset(j for j, r in ratios.items() if abs(r - 1.0) <= epsilon)
    if selected:
        return selected, False
    closest = min(ratios, key=lambda j: (abs(ratios[j] - 1.0), j))
    return frozenset({closest}), True
