"""Write and read CSV artifacts atomically."""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import tempfile
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from pointrep.enums import Role
from pointrep.estimator import CoefficientTable, ProcessSample
from pointrep.ingest import OccurrenceSet
from pointrep.risk import RiskSurface, ValidationRow
from pointrep.stepfn import StepFunction

__all__ = [
    "atomic_write",
    "format_value",
    "csv_text",
    "write_csv",
    "write_step_function",
    "read_step_function",
    "write_coefficients",
    "write_sample",
    "read_sample",
    "sidecar_path",
    "write_positions",
    "write_surface",
    "write_validation",
]

logger = logging.getLogger(__name__)

STEP_HEADER = ("left", "right", "value")
COEFFICIENT_HEADER = (
    "j",
    "k",
    "beta_hat",
    "b_stat",
    "v_hat",
    "v_tilde",
    "eta",
    "kept",
    "beta_tilde",
)
SAMPLE_HEADER = ("role", "position")
SURFACE_HEADER = ("gamma", "delta", "mean_risk", "stderr", "reps")
VALIDATION_HEADER = (
    "j",
    "k",
    "mean",
    "stderr",
    "true_beta",
    "variance",
    "z_score",
    "reps",
)


def atomic_write(path: str | Path, text: str) -> Path:
    """Write ``text`` to a temporary file beside ``path``, then rename it.

    Readers see either the previous file or the complete new one.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(
        prefix=f".{path.name}.", suffix=".tmp", dir=path.parent
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    logger.debug("wrote %s", path)
    return path


def format_value(value: Any) -> str:
    """Shortest text that reads back to the same value."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def write_csv(
    path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]
) -> Path:
    return atomic_write(path, csv_text(header, rows))


def _read_rows(path: str | Path, header: Sequence[str]) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != tuple(header):
            raise ValueError(f"{path}: expected header {','.join(header)}")
        return list(reader)


# Step functions -----------------------------------------------------


def write_step_function(path: str | Path, f: StepFunction) -> Path:
    return write_csv(path, STEP_HEADER, f.pieces())


def read_step_function(path: str | Path) -> StepFunction:
    """Read a ``left,right,value`` file; gaps between pieces are zero."""
    rows = _read_rows(path, STEP_HEADER)
    if not rows:
        return StepFunction.zero()
    breaks = [float(rows[0]["left"])]
    values: list[float] = []
    for row in rows:
        left, right = float(row["left"]), float(row["right"])
        if left != breaks[-1]:
            breaks.append(left)
            values.append(0.0)
        breaks.append(right)
        values.append(float(row["value"]))
    return StepFunction(breaks, values)


# Coefficients -------------------------------------------------------


def write_coefficients(path: str | Path, table: CoefficientTable) -> Path:
    return write_csv(
        path,
        COEFFICIENT_HEADER,
        ([row[name] for name in COEFFICIENT_HEADER] for row in table.rows()),
    )


# Samples ------------------------------------------------------------


def sidecar_path(path: str | Path) -> Path:
    """The metadata file next to a sample: ``sample.csv`` -> ``sample.json``."""
    return Path(path).with_suffix(".json")


def write_sample(
    path: str | Path, sample: ProcessSample, metadata: dict[str, Any] | None = None
) -> Path:
    """Write the sample CSV and its JSON sidecar (T, n, and ``metadata``)."""
    rows = [(Role.parent, u) for u in sample.parents]
    rows.extend((Role.child, x) for x in sample.children)
    path = write_csv(path, SAMPLE_HEADER, rows)

    meta = {"T": sample.T, "n": sample.n, "n_children": sample.n_children}
    meta.update(metadata or {})
    text = json.dumps(meta, indent=2, sort_keys=True) + "\n"
    atomic_write(sidecar_path(path), text)
    return path


def read_sample(path: str | Path, T: float | None = None) -> ProcessSample:
    """Read a sample CSV; T comes from the sidecar unless given."""
    parents: list[float] = []
    children: list[float] = []
    for row in _read_rows(path, SAMPLE_HEADER):
        role = Role(row["role"])
        target = parents if role is Role.parent else children
        target.append(float(row["position"]))

    if T is None:
        meta = sidecar_path(path)
        if not meta.exists():
            raise ValueError(f"{path}: no horizon given and no {meta.name}")
        T = float(json.loads(meta.read_text(encoding="utf-8"))["T"])
    return ProcessSample(np.array(parents), np.array(children), T)


def write_positions(path: str | Path, occ: OccurrenceSet) -> Path:
    """One position per line, readable by :func:`pointrep.ingest.read_positions`."""
    header = f"# {occ.source or 'positions'} ({occ.unit})\n"
    body = "".join(f"{format_value(x)}\n" for x in occ.positions)
    return atomic_write(path, header + body)


# Monte Carlo reports ------------------------------------------------


def write_surface(path: str | Path, surface: RiskSurface) -> Path:
    return write_csv(
        path,
        SURFACE_HEADER,
        (
            (gamma, delta, risk, err, surface.reps)
            for gamma, delta, risk, err in surface.cells()
        ),
    )


def write_validation(path: str | Path, rows: Iterable[ValidationRow]) -> Path:
    return write_csv(
        path,
        VALIDATION_HEADER,
        (
            (
                row.index.j,
                row.index.k,
                row.mean,
                row.stderr,
                row.true_beta,
                row.variance,
                row.z_score,
                row.reps,
            )
            for row in rows
        ),
    )
