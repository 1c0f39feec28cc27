"""qvfdag command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric or internal failure.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence

import structlog
from pydantic import ValidationError

from qvfdag import __version__
from qvfdag.cli.commands import cmd_bench, cmd_eval, cmd_learn, cmd_simulate
from qvfdag.common.config import get_settings
from qvfdag.common.errors import DataError, QvfDagError
from qvfdag.common.logging import configure_logging, set_run_id
from qvfdag.simulation import PRESETS

logger = structlog.get_logger()

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _range(text: str) -> tuple[float, float]:
    values = _float_list(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected LOW,HIGH, got {text!r}")
    return values[0], values[1]


def _add_learner_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--epsilon",
        type=_float_list,
        default=None,
        help="Fixed layer threshold(s), comma-separated per layer; bypasses stability selection",
    )
    parser.add_argument("--splits", type=int, default=None, help="Stability half-splits per layer (default 5)")
    parser.add_argument("--c", type=float, default=None, help="Stability cutoff fraction in (0, 1) (default 0.9)")
    parser.add_argument("--no-timing", action="store_true", help="Omit wall-clock fields for byte-identical output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qvfdag", description="Learn QVF-DAG structure by topological layers")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="Log level (default from QVF_DAG_LOG_LEVEL or INFO)")
    parser.add_argument("--threads", type=int, default=None, help="Worker count; 0 = all cores")
    parser.add_argument("--seed", type=int, default=None, help="Base seed (default from QVF_DAG_SEED)")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Generate data from a preset or an edge list")
    source = sim.add_mutually_exclusive_group(required=True)
    source.add_argument("--preset", choices=sorted(PRESETS), help="Built-in simulation regime")
    source.add_argument("--edges", help="Edge-list CSV (source,target; 1-based) for a custom graph")
    sim.add_argument("--p", type=int, default=None, help="Node count")
    sim.add_argument("--n", type=int, required=True, help="Sample count")
    sim.add_argument("--out", required=True, help="Existing output directory")
    sim.add_argument("--family", choices=["poisson", "binomial", "exponential"], default="poisson")
    sim.add_argument("--trials", type=int, default=None, help="Binomial trials for --family binomial")
    sim.add_argument("--intercept-range", type=_range, default=(1.0, 3.0), help="LOW,HIGH for intercepts")
    sim.add_argument("--weight-range", type=_range, default=(0.1, 0.5), help="LOW,HIGH for edge weights")
    sim.set_defaults(handler=cmd_simulate)

    learn = sub.add_parser("learn", help="Learn layers and edges from a data CSV")
    learn.add_argument("--data", required=True, help="Data CSV with a header row")
    learn.add_argument("--families", default=None, help="Family config JSON (one object or one per column)")
    learn.add_argument("--out", required=True, help="Existing output directory")
    learn.add_argument("--emit-ratios", action="store_true", help="Also write ratios.json")
    _add_learner_flags(learn)
    learn.set_defaults(handler=cmd_learn)

    ev = sub.add_parser("eval", help="Score an estimated edge list against the truth")
    ev.add_argument("--estimated", required=True, help="Estimated edge-list CSV")
    ev.add_argument("--truth", required=True, help="True edge-list CSV")
    ev.add_argument("--p", type=int, default=None, help="Node count (default: largest id in either file)")
    ev.add_argument("--out", default=None, help="Also write the metrics JSON here")
    ev.add_argument("--hm-normalization", choices=["skeleton", "ordered"], default=None)
    ev.set_defaults(handler=cmd_eval)

    bench = sub.add_parser("bench", help="Seeded replications of a preset")
    bench.add_argument("--preset", choices=sorted(PRESETS), required=True)
    bench.add_argument("--p", type=_int_list, required=True, help="Comma-separated node counts")
    bench.add_argument("--n", type=_int_list, required=True, help="Comma-separated sample counts")
    bench.add_argument("--reps", type=int, default=50, help="Replications per cell (default 50)")
    bench.add_argument("--out", required=True, help="Existing output directory")
    bench.add_argument("--time-only", action="store_true", help="Write only the timing table")
    bench.add_argument("--hm-normalization", choices=["skeleton", "ordered"], default=None)
    _add_learner_flags(bench)
    bench.set_defaults(handler=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "reps", 1) < 1:
        parser.error("--reps must be at least 1")
    try:
        settings = get_settings()
    except ValidationError as exc:
        sys.stderr.write(f"qvfdag: invalid QVF_DAG_* environment: {exc}\n")
        return EXIT_USAGE
    configure_logging(args.log_level or settings.log_level, settings.log_format)
    set_run_id()

    try:
        return int(args.handler(args, settings))
    except DataError as exc:
        logger.error("data_error", command=args.command, error=str(exc))
        sys.stderr.write(f"qvfdag: error: {exc}\n")
        return EXIT_DATA
    except ValidationError as exc:
        logger.error("invalid_configuration", command=args.command, error=str(exc))
        sys.stderr.write(f"qvfdag: invalid configuration: {exc}\n")
        return EXIT_USAGE
    except QvfDagError as exc:
        logger.error("numeric_failure", command=args.command, error=str(exc))
        sys.stderr.write(f"qvfdag: error: {exc}\n")
        return EXIT_NUMERIC
    except Exception:
        logger.exception("internal_error", command=args.command)
        return EXIT_NUMERIC

