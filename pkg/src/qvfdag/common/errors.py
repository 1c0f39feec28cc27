"""Exception hierarchy shared by the library and the CLI.

The CLI maps the three top-level families onto exit codes: ``DataError`` -> 2,
``NumericError`` -> 3, anything else derived from ``QvfDagError`` -> 3.
"""

from __future__ import annotations


class QvfDagError(Exception):
    """Base class for all errors raised by qvfdag."""


class DataError(QvfDagError):
    """Input data, configuration files, or output paths are unusable."""


class NumericError(QvfDagError):
    """A numerical procedure failed on otherwise valid input."""


class StructureError(QvfDagError):
    """A graph violates a structural invariant."""


# ── Structure ───────────────────────────────────────────────────────────


class CycleError(StructureError):
    """Raised when an edge set contains a directed cycle."""

    def __init__(self, message: str, *, edge: tuple[int, int]) -> None:
        super().__init__(message)
        self.edge = edge


class LayerOrderError(StructureError):
    """Raised when an edge does not point from a lower to a higher layer."""

    def __init__(self, message: str, *, edge: tuple[int, int]) -> None:
        super().__init__(message)
        self.edge = edge


# ── Data ────────────────────────────────────────────────────────────────


class CsvFormatError(DataError):
    """Raised when a data CSV is ragged, empty, or non-numeric."""

    def __init__(self, message: str, *, row: int | None = None, column: int | None = None) -> None:
        super().__init__(message)
        self.row = row
        self.column = column


class EdgeListError(DataError):
    """Raised when an edge-list file cannot be parsed."""


class FamilyConfigError(DataError):
    """Raised when family configuration does not match the data."""


class OutputPathError(DataError):
    """Raised when an output location is missing or not writable."""


class MissingRangeError(DataError):
    """Raised when no parameter range exists for a requested simulation regime."""


class DimensionMismatchError(DataError):
    """Raised when array shapes disagree with a fitted model."""


class GlmInputError(DataError):
    """Raised when a GLM response or design matrix is invalid for the family."""


class DegenerateColumnError(DataError):
    """Raised when a column has zero mean or zero variance, so its ratio is undefined."""

    def __init__(self, message: str, *, node: int | None = None) -> None:
        super().__init__(message)
        self.node = node


# ── Numeric ─────────────────────────────────────────────────────────────


class DegenerateWeightError(NumericError):
    """Raised when beta1 + beta2 * mu is numerically zero."""

    def __init__(self, message: str, *, node: int | None = None, mu: float | None = None) -> None:
        super().__init__(message)
        self.node = node
        self.mu = mu


class GlmConvergenceError(NumericError):
    """Raised by callers that require a converged GLM fit."""

    def __init__(self, message: str, *, node: int | None = None) -> None:
        super().__init__(message)
        self.node = node


class LayerLearningError(NumericError):
    """A ratio or GLM failure during layer reconstruction, annotated with the step."""

    def __init__(self, message: str, *, step: int, node: int | None = None) -> None:
        super().__init__(message)
        self.step = step
        self.node = node
