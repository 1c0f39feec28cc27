"""File formats: data CSV, edge-list CSV, JSON manifests, and staged writes.

Node ids are 1-based in every file and 0-based in memory.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pandas as pd
import structlog
from numpy.typing import NDArray

from qvfdag.common.errors import CsvFormatError, EdgeListError, OutputPathError, StructureError
from qvfdag.graph import Dag

logger = structlog.get_logger()

SCHEMA_VERSION = 1

_LINE_RE = re.compile(r"line (\d+)")


def data_header(p: int) -> list[str]:
    return [f"x{j + 1}" for j in range(p)]


def read_data_csv(path: str | Path) -> tuple[NDArray[np.float64], list[str]]:
    """Read a numeric CSV with a header row.

    Raises ``CsvFormatError`` with the 1-based file line and column of the
    first ragged, empty, or non-numeric cell.
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=True)
    except FileNotFoundError as exc:
        raise CsvFormatError(f"data file not found: {path}") from exc
    except pd.errors.EmptyDataError as exc:
        raise CsvFormatError(f"data file {path} is empty") from exc
    except pd.errors.ParserError as exc:
        match = _LINE_RE.search(str(exc))
        row = int(match.group(1)) if match else None
        raise CsvFormatError(f"ragged row in {path}: {exc}", row=row) from exc

    if frame.shape[1] == 0 or frame.shape[0] == 0:
        raise CsvFormatError(f"data file {path} has no data rows")
    names = [str(c) for c in frame.columns]
    matrix = np.empty(frame.shape, dtype=np.float64)
    for c, name in enumerate(names):
        raw = frame[name].str.strip()
        numeric = pd.to_numeric(raw, errors="coerce")
        bad = numeric.isna() | ~np.isfinite(numeric.to_numpy(dtype=np.float64, na_value=np.nan))
        if bad.any():
            i = int(np.flatnonzero(bad.to_numpy())[0])
            value = raw.iloc[i]
            # +2: header line plus 1-based numbering.
            raise CsvFormatError(
                f"{path}: line {i + 2}, column {c + 1} ({name}): {'missing value' if value == '' else repr(value)}",
                row=i + 2,
                column=c + 1,
            )
        matrix[:, c] = numeric.to_numpy(dtype=np.float64)
    return matrix, names


def write_data_csv(path: str | Path, data: NDArray[np.float64], names: list[str] | None = None) -> None:
    """Write with header ``x1..xp`` (or ``names``); integral columns are written as integers."""
    frame = pd.DataFrame(data, columns=names or data_header(data.shape[1]))
    for col in frame.columns:
        values = frame[col].to_numpy()
        if np.all(np.isfinite(values)) and np.all(values == np.round(values)):
            frame[col] = values.astype(np.int64)
    frame.to_csv(path, index=False, lineterminator="\n")


def read_edge_list(path: str | Path) -> list[tuple[int, int]]:
    """Read a ``source,target`` CSV of 1-based ids into 0-based edge pairs."""
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except FileNotFoundError as exc:
        raise EdgeListError(f"edge list not found: {path}") from exc
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as exc:
        raise EdgeListError(f"cannot parse edge list {path}: {exc}") from exc
    if [c.strip() for c in frame.columns] != ["source", "target"]:
        raise EdgeListError(f"{path}: header must be 'source,target', got {','.join(frame.columns)}")
    edges: list[tuple[int, int]] = []
    for i, (src, dst) in enumerate(frame.itertuples(index=False, name=None)):
        try:
            k, j = int(src.strip()), int(dst.strip())
        except ValueError as exc:
            raise EdgeListError(f"{path}: line {i + 2}: non-integer node id") from exc
        if k < 1 or j < 1:
            raise EdgeListError(f"{path}: line {i + 2}: node ids are 1-based")
        edges.append((k - 1, j - 1))
    return edges


def read_dag(path: str | Path, p: int | None = None) -> Dag:
    """Edge list as a Dag; ``p`` defaults to the largest id mentioned."""
    edges = read_edge_list(path)
    inferred = max((max(k, j) + 1 for k, j in edges), default=1)
    size = inferred if p is None else p
    if size < inferred:
        raise EdgeListError(f"{path} mentions node {inferred} but p={size}")
    try:
        return Dag.from_edges(size, edges)
    except StructureError as exc:
        raise EdgeListError(f"{path}: {exc}") from exc


def write_edge_list(path: str | Path, dag: Dag) -> None:
    lines = ["source,target"] + [f"{k + 1},{j + 1}" for k, j in dag.sorted_edges()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def dump_json(payload: dict) -> str:
    return json.dumps({"schema": SCHEMA_VERSION, **payload}, indent=2) + "\n"


def write_json(path: str | Path, payload: dict) -> None:
    Path(path).write_text(dump_json(payload), encoding="utf-8")


def read_json(path: str | Path) -> object:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise OutputPathError(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise CsvFormatError(f"{path}: invalid JSON at line {exc.lineno}", row=exc.lineno) from exc


def check_output_dir(path: str | Path) -> Path:
    out = Path(path)
    if not out.is_dir():
        raise OutputPathError(f"output directory does not exist: {out}")
    if not os.access(out, os.W_OK):
        raise OutputPathError(f"output directory is not writable: {out}")
    return out


class StagedOutputs:
    """Temp files in the output directory, renamed into place only when every write succeeded."""

    def __init__(self, out_dir: Path) -> None:
        self.out_dir = out_dir
        self._staged: dict[Path, Path] = {}

    def path(self, name: str) -> Path:
        fd, tmp = tempfile.mkstemp(prefix=f".{name}.", suffix=".tmp", dir=self.out_dir)
        os.close(fd)
        self._staged[self.out_dir / name] = Path(tmp)
        return Path(tmp)

    def commit(self) -> list[Path]:
        for final, tmp in self._staged.items():
            os.replace(tmp, final)
        written = list(self._staged)
        self._staged.clear()
        return written

    def discard(self) -> None:
        for tmp in self._staged.values():
            tmp.unlink(missing_ok=True)
        self._staged.clear()


@contextmanager
def staged_outputs(out_dir: str | Path) -> Iterator[StagedOutputs]:
    """Yield a stager for ``out_dir``; nothing appears there unless the block completes."""
    stager = StagedOutputs(check_output_dir(out_dir))
    try:
        yield stager
    except BaseException:
        stager.discard()
        raise
    written = stager.commit()
    logger.debug("outputs_written", files=[p.name for p in written])
