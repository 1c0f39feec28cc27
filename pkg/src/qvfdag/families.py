"""Quadratic-variance-function distribution families.

A QVF family satisfies ``Var(X | parents) = beta1 * mu + beta2 * mu**2`` with
``mu = E[X | parents]``. Each family also carries the link used to model ``mu``
from a linear predictor ``eta``, the per-observation negative log-likelihood
used by the GLM engine, and a sampler.

Supported kinds and their constants:

- Poisson: (1, 0), log link
- Binomial(N): (1, -1/N), logit link on the success probability
- Exponential: (0, 1), log link
- Mixture: a fair per-observation coin between two component families; used
  for simulation only, it has no QVF constants of its own.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

import numpy as np
import structlog
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.special import expit, logit, xlogy

from qvfdag.common.errors import DegenerateWeightError, FamilyConfigError, GlmInputError

logger = structlog.get_logger()

ETA_CLAMP = 30.0
WEIGHT_TOL = 1e-12

type Eta = float | ArrayLike | tuple[ArrayLike, ArrayLike]


class FamilyKind(StrEnum):
    POISSON = "poisson"
    BINOMIAL = "binomial"
    EXPONENTIAL = "exponential"
    MIXTURE = "mixture"


def clamp_eta(eta: ArrayLike) -> NDArray[np.float64]:
    return np.clip(np.asarray(eta, dtype=np.float64), -ETA_CLAMP, ETA_CLAMP)


def _scalar_or_array(values: NDArray[np.float64]) -> Any:
    return float(values) if values.ndim == 0 else values


class QvfFamily(BaseModel):
    """Per-node distribution spec, serialized as e.g. ``{"kind": "binomial", "trials": 4}``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: FamilyKind
    trials: int | None = None
    components: tuple[QvfFamily, QvfFamily] | None = None

    @model_validator(mode="after")
    def _check_kind_fields(self) -> QvfFamily:
        if self.kind is FamilyKind.BINOMIAL:
            if self.trials is not None and self.trials < 2:
                raise ValueError(f"binomial trials must be >= 2 so that beta2 > -1, got {self.trials}")
        elif self.trials is not None:
            raise ValueError(f"trials only applies to binomial, not {self.kind}")
        if self.kind is FamilyKind.MIXTURE:
            if self.components is None:
                raise ValueError("mixture requires two components")
            if any(c.kind is FamilyKind.MIXTURE for c in self.components):
                raise ValueError("mixture components cannot be mixtures")
        elif self.components is not None:
            raise ValueError(f"components only apply to mixture, not {self.kind}")
        return self

    # ── constructors ─────────────────────────────────────────────────────

    @classmethod
    def poisson(cls) -> QvfFamily:
        return cls(kind=FamilyKind.POISSON)

    @classmethod
    def binomial(cls, trials: int | None = None) -> QvfFamily:
        return cls(kind=FamilyKind.BINOMIAL, trials=trials)

    @classmethod
    def exponential(cls) -> QvfFamily:
        return cls(kind=FamilyKind.EXPONENTIAL)

    @classmethod
    def mixture(cls, first: QvfFamily, second: QvfFamily) -> QvfFamily:
        return cls(kind=FamilyKind.MIXTURE, components=(first, second))

    # ── QVF constants ────────────────────────────────────────────────────

    @property
    def beta1(self) -> float:
        return self._betas()[0]

    @property
    def beta2(self) -> float:
        return self._betas()[1]

    def _betas(self) -> tuple[float, float]:
        match self.kind:
            case FamilyKind.POISSON:
                return 1.0, 0.0
            case FamilyKind.BINOMIAL:
                return 1.0, -1.0 / self._n()
            case FamilyKind.EXPONENTIAL:
                return 0.0, 1.0
            case _:
                raise FamilyConfigError(
                    "a mixture has no QVF constants; configure the learner family per node instead"
                )

    def _n(self) -> int:
        if self.trials is None:
            raise FamilyConfigError("binomial trials not set; resolve the family against its data column first")
        return self.trials

    @property
    def is_resolved(self) -> bool:
        if self.kind is FamilyKind.BINOMIAL:
            return self.trials is not None
        if self.components is not None:
            return all(c.is_resolved for c in self.components)
        return True

    def resolve(self, column: ArrayLike, *, node: int | None = None) -> QvfFamily:
        """Fill in binomial trials from the observed column maximum (floored at 2)."""
        if self.kind is FamilyKind.MIXTURE and self.components is not None:
            first, second = (c.resolve(column, node=node) for c in self.components)
            return QvfFamily.mixture(first, second)
        if self.kind is not FamilyKind.BINOMIAL or self.trials is not None:
            return self
        observed = float(np.max(np.asarray(column, dtype=np.float64)))
        trials = max(2, math.ceil(observed))
        logger.info("binomial_trials_inferred", node=None if node is None else node + 1, trials=trials)
        return QvfFamily.binomial(trials)

    # ── moments ──────────────────────────────────────────────────────────

    def mean_from_eta(self, eta: Eta) -> Any:
        """Conditional mean for linear predictor ``eta`` (clamped to [-30, 30])."""
        if self.kind is FamilyKind.MIXTURE:
            first, second = self._components()
            eta_a, eta_b = _split_eta(eta)
            return _scalar_or_array(
                0.5 * np.asarray(first.mean_from_eta(eta_a)) + 0.5 * np.asarray(second.mean_from_eta(eta_b))
            )
        clamped = clamp_eta(eta)  # type: ignore[arg-type]
        match self.kind:
            case FamilyKind.BINOMIAL:
                mean = self._n() * expit(clamped)
            case _:
                mean = np.exp(clamped)
        return _scalar_or_array(np.asarray(mean, dtype=np.float64))

    def omega(self, mu: ArrayLike, *, node: int | None = None) -> Any:
        """Weight ``(beta1 + beta2 * mu) ** -1``; raises when the denominator vanishes."""
        mu_arr = np.asarray(mu, dtype=np.float64)
        denom = self.beta1 + self.beta2 * mu_arr
        bad = np.abs(denom) <= WEIGHT_TOL
        if np.any(bad):
            worst = float(mu_arr[bad].flat[0]) if mu_arr.ndim else float(mu_arr)
            label = "?" if node is None else str(node + 1)
            raise DegenerateWeightError(
                f"weight undefined for node {label}: beta1 + beta2 * mu = 0 at mu={worst:.6g}", node=node, mu=worst
            )
        return _scalar_or_array(1.0 / denom)

    def model_variance(self, mu: ArrayLike) -> Any:
        mu_arr = np.asarray(mu, dtype=np.float64)
        return _scalar_or_array(self.beta1 * mu_arr + self.beta2 * mu_arr**2)

    # ── sampling ─────────────────────────────────────────────────────────

    def sample(self, eta: Eta, rng: np.random.Generator) -> Any:
        """Draw one value per entry of ``eta``.

        A mixture tosses a fair coin per observation, then samples the chosen
        component; ``eta`` may be a pair of per-component predictors.
        """
        if self.kind is FamilyKind.MIXTURE:
            first, second = self._components()
            eta_a, eta_b = _split_eta(eta)
            shape = np.broadcast_shapes(np.shape(eta_a), np.shape(eta_b))
            coin = rng.random(shape) < 0.5
            draw_a = np.broadcast_to(np.asarray(first.sample(eta_a, rng), dtype=np.float64), shape)
            draw_b = np.broadcast_to(np.asarray(second.sample(eta_b, rng), dtype=np.float64), shape)
            return _scalar_or_array(np.where(coin, draw_a, draw_b))
        clamped = clamp_eta(eta)  # type: ignore[arg-type]
        match self.kind:
            case FamilyKind.POISSON:
                draws = rng.poisson(np.exp(clamped))
            case FamilyKind.BINOMIAL:
                draws = rng.binomial(self._n(), expit(clamped))
            case _:
                draws = rng.exponential(np.exp(clamped))
        return _scalar_or_array(np.asarray(draws, dtype=np.float64))

    def _components(self) -> tuple[QvfFamily, QvfFamily]:
        assert self.components is not None
        return self.components

    # ── GLM hooks ────────────────────────────────────────────────────────

    def check_response(self, y: NDArray[np.float64]) -> None:
        """Reject responses outside the family's support."""
        if self.kind is FamilyKind.MIXTURE:
            raise FamilyConfigError("cannot fit a GLM for a mixture family")
        if not np.all(np.isfinite(y)):
            raise GlmInputError("response contains non-finite values")
        if np.any(y < 0):
            raise GlmInputError(f"{self.kind} response must be nonnegative")
        if self.kind is FamilyKind.BINOMIAL and np.any(y > self._n()):
            raise GlmInputError(f"binomial response exceeds trials N={self._n()}")

    def link(self, mu: ArrayLike) -> Any:
        """Map a mean onto the linear-predictor scale, clipped into the open support."""
        mu_arr = np.asarray(mu, dtype=np.float64)
        if self.kind is FamilyKind.BINOMIAL:
            n = self._n()
            prob = np.clip(mu_arr / n, 1e-10, 1 - 1e-10)
            return _scalar_or_array(np.clip(logit(prob), -ETA_CLAMP, ETA_CLAMP))
        return _scalar_or_array(np.clip(np.log(np.maximum(mu_arr, 1e-10)), -ETA_CLAMP, ETA_CLAMP))

    def nll(self, y: NDArray[np.float64], eta: NDArray[np.float64]) -> NDArray[np.float64]:
        """Per-observation negative log-likelihood, dropping terms free of ``eta``."""
        clamped = clamp_eta(eta)
        match self.kind:
            case FamilyKind.POISSON:
                return np.exp(clamped) - y * clamped
            case FamilyKind.BINOMIAL:
                return self._n() * np.logaddexp(0.0, clamped) - y * clamped
            case FamilyKind.EXPONENTIAL:
                return y * np.exp(-clamped) + clamped
            case _:
                raise FamilyConfigError("cannot evaluate a likelihood for a mixture family")

    def unit_deviance(self, y: NDArray[np.float64], eta: NDArray[np.float64]) -> NDArray[np.float64]:
        """Twice the log-likelihood gap to the saturated model; nonnegative, zero where mu == y."""
        clamped = clamp_eta(eta)
        mu = np.exp(clamped)
        match self.kind:
            case FamilyKind.POISSON:
                return 2.0 * (xlogy(y, y) - y * clamped - y + mu)
            case FamilyKind.BINOMIAL:
                n = self._n()
                prob = expit(clamped)
                return 2.0 * (xlogy(y, y / (n * prob)) + xlogy(n - y, (n - y) / (n * (1.0 - prob))))
            case FamilyKind.EXPONENTIAL:
                # The saturated mean is floored so y == 0 stays finite.
                saturated = np.maximum(y, np.finfo(np.float64).tiny)
                return 2.0 * (y / mu - np.log(saturated / mu) - 1.0)
            case _:
                raise FamilyConfigError("cannot evaluate a likelihood for a mixture family")

    def nll_derivative(self, y: NDArray[np.float64], eta: NDArray[np.float64]) -> NDArray[np.float64]:
        """d nll / d eta per observation."""
        clamped = clamp_eta(eta)
        match self.kind:
            case FamilyKind.POISSON:
                return np.exp(clamped) - y
            case FamilyKind.BINOMIAL:
                return self._n() * expit(clamped) - y
            case FamilyKind.EXPONENTIAL:
                return 1.0 - y * np.exp(-clamped)
            case _:
                raise FamilyConfigError("cannot evaluate a likelihood for a mixture family")

    def fisher_weight(self, eta: NDArray[np.float64]) -> NDArray[np.float64]:
        """Expected second derivative of nll in ``eta`` (IRLS working weight)."""
        clamped = clamp_eta(eta)
        match self.kind:
            case FamilyKind.POISSON:
                return np.exp(clamped)
            case FamilyKind.BINOMIAL:
                prob = expit(clamped)
                return self._n() * prob * (1.0 - prob)
            case FamilyKind.EXPONENTIAL:
                return np.ones_like(clamped)
            case _:
                raise FamilyConfigError("cannot evaluate a likelihood for a mixture family")

    def label(self) -> str:
        if self.kind is FamilyKind.BINOMIAL:
            return f"binomial({self.trials if self.trials is not None else '?'})"
        if self.kind is FamilyKind.MIXTURE and self.components is not None:
            return "mixture(" + ", ".join(c.label() for c in self.components) + ")"
        return str(self.kind)


def _split_eta(eta: Eta) -> tuple[ArrayLike, ArrayLike]:
    if isinstance(eta, tuple):
        return eta[0], eta[1]
    return eta, eta  # type: ignore[return-value]


# Functional aliases matching the operation names used in the docs.


def mean_from_eta(family: QvfFamily, eta: Eta) -> Any:
    return family.mean_from_eta(eta)


def omega(family: QvfFamily, mu: ArrayLike, *, node: int | None = None) -> Any:
    return family.omega(mu, node=node)


def model_variance(family: QvfFamily, mu: ArrayLike) -> Any:
    return family.model_variance(mu)


def sample(family: QvfFamily, eta: Eta, rng: np.random.Generator) -> Any:
    return family.sample(eta, rng)


def parse_families(payload: object, p: int) -> list[QvfFamily]:
    """Parse a family config: one object for every column, or a list with one object per column."""
    try:
        if isinstance(payload, dict):
            family = QvfFamily.model_validate(payload)
            return [family] * p
        if isinstance(payload, Sequence) and not isinstance(payload, str):
            families = [QvfFamily.model_validate(item) for item in payload]
        else:
            raise FamilyConfigError("family config must be an object or a list of objects")
    except ValueError as exc:
        raise FamilyConfigError(f"invalid family config: {exc}") from exc
    if len(families) != p:
        raise FamilyConfigError(f"family config lists {len(families)} families but the data has {p} columns")
    return families


def resolve_families(families: Sequence[QvfFamily], data: NDArray[np.float64]) -> list[QvfFamily]:
    """Resolve every family against its data column."""
    if len(families) != data.shape[1]:
        raise FamilyConfigError(f"{len(families)} families for {data.shape[1]} columns")
    return [fam.resolve(data[:, j], node=j) for j, fam in enumerate(families)]


QvfFamily.model_rebuild()


@dataclass(frozen=True)
class LinearPredictor:
    """Intercept ``theta_j`` plus one coefficient per conditioning node."""

    intercept: float
    coefficients: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self) -> None:
        coefs = np.asarray(self.coefficients, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "coefficients", coefs)
        if not (math.isfinite(self.intercept) and np.all(np.isfinite(coefs))):
            raise GlmInputError("linear predictor entries must be finite")

    @property
    def q(self) -> int:
        return int(self.coefficients.shape[0])

    def eta(self, X: NDArray[np.float64]) -> NDArray[np.float64]:
        return self.intercept + X @ self.coefficients

    def as_vector(self) -> NDArray[np.float64]:
        return np.concatenate(([self.intercept], self.coefficients))
