"""Structured logging with structlog, run IDs, and phase timing."""

import logging
import sys
import time
import uuid
from collections.abc import Iterator
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field

import structlog

run_id_var: ContextVar[str] = ContextVar("run_id", default="")


def get_run_id() -> str:
    return run_id_var.get()


def set_run_id(rid: str | None = None) -> str:
    rid = rid or uuid.uuid4().hex[:16]
    run_id_var.set(rid)
    return rid


def add_run_id(_logger: structlog.types.WrappedLogger, _method_name: str, event_dict: dict) -> dict:
    rid = run_id_var.get()
    if rid:
        event_dict["run_id"] = rid
    return event_dict


def configure_logging(log_level: str = "INFO", log_format: str = "json") -> None:
    """Configure structlog for the process; logs go to stderr."""
    renderer: structlog.types.Processor = (
        structlog.dev.ConsoleRenderer() if log_format == "console" else structlog.processors.JSONRenderer()
    )
    level = logging.getLevelNamesMapping().get(log_level.upper(), logging.INFO)
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            add_run_id,  # type: ignore[list-item]
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(level),
        context_class=dict,
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )


@dataclass
class PhaseTimer:
    """Tracks wall-clock time per pipeline phase."""

    phases: list[dict] = field(default_factory=list)

    @contextmanager
    def phase(self, name: str, **context: object) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.record(name, time.perf_counter() - start, **context)

    def record(self, name: str, seconds: float, **context: object) -> None:
        info = {"phase": name, "seconds": round(seconds, 6), **context}
        self.phases.append(info)
        log = structlog.get_logger()
        log.info("phase_completed", **info)

    def seconds(self, name: str) -> float:
        return float(sum(p["seconds"] for p in self.phases if p["phase"] == name))

    @property
    def total_seconds(self) -> float:
        return float(sum(p["seconds"] for p in self.phases))

    def as_dict(self) -> dict[str, float]:
        totals: dict[str, float] = {}
        for p in self.phases:
            totals[p["phase"]] = round(totals.get(p["phase"], 0.0) + p["seconds"], 6)
        return totals
