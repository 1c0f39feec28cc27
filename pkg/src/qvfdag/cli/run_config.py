"""Validated record of one CLI invocation, embedded in every output it writes."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from qvfdag.evaluation import HmNormalization
from qvfdag.learning import LayerLearnConfig
from qvfdag.simulation import SimSpec


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Literal["simulate", "learn", "eval", "bench"]
    seed: int
    threads: int = Field(ge=1)
    output: str | None = None
    data_path: str | None = None
    families_path: str | None = None
    estimated_path: str | None = None
    truth_path: str | None = None
    preset: str | None = None
    sizes: tuple[int, ...] = ()
    samples: tuple[int, ...] = ()
    reps: int | None = Field(default=None, ge=1)
    sim: SimSpec | None = None
    learn: LayerLearnConfig | None = None
    hm_normalization: HmNormalization = "skeleton"
    record_timing: bool = True

    def manifest(self) -> dict:
        """JSON-ready config; thread count is omitted so outputs match across worker counts."""
        return self.model_dump(mode="json", exclude={"threads": True, "learn": {"n_jobs": True}}, exclude_none=True)
