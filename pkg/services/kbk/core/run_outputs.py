"""Plain-text and JSON writers for a run directory.

Numeric text is written with ``%.16e`` so repeated runs diff byte-for-byte.
Nothing non-finite is ever written.
"""

import json
import logging
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from services.kbk.core.diagnostics import DIAGNOSTICS_COLUMNS, DiagnosticsRecord
from services.kbk.core.kbk_dynamics import State
from services.kbk.core.schema_validation import validate_schema

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.16e"


class OutputError(OSError):
    """A run directory or file could not be written."""


def _finite(name: str, values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise OutputError(f"Refusing to write non-finite values to {name}")
    return values


def _fmt(value: float) -> str:
    return FLOAT_FORMAT % value


def prepare_run_dir(base: str | Path, name: str) -> Path:
    run_dir = Path(base) / name
    try:
        (run_dir / "snapshots").mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"Cannot create run directory {run_dir}: {exc}") from exc
    logger.info("Writing run outputs to %s", run_dir)
    return run_dir


def _write_text(path: Path, text: str) -> Path:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"Cannot write {path}: {exc}") from exc
    return path


def _savetxt(path: Path, rows: np.ndarray, header: str) -> Path:
    rows = _finite(path.name, rows)
    try:
        np.savetxt(path, rows, fmt=FLOAT_FORMAT, header=header, comments="# ")
    except OSError as exc:
        raise OutputError(f"Cannot write {path}: {exc}") from exc
    return path


def write_diagnostics(path: Path, records: Sequence[DiagnosticsRecord]) -> Path:
    lines = [",".join(DIAGNOSTICS_COLUMNS)]
    for record in records:
        row = _finite(path.name, np.array(record.csv_row()))
        lines.append(",".join(_fmt(value) for value in row))
    return _write_text(path, "\n".join(lines) + "\n")


def write_densities(path: Path, records: Sequence[DiagnosticsRecord]) -> Path:
    """t followed by real and imaginary parts of each conserved density integral."""
    if not records:
        return _write_text(path, "t\n")
    n = len(records[0].rho_integrals)
    header = ["t"] + [f"rho{k}_{part}" for k in range(1, n + 1) for part in ("re", "im")]
    lines = [",".join(header)]
    for record in records:
        parts = np.column_stack([record.rho_integrals.real, record.rho_integrals.imag]).ravel()
        row = _finite(path.name, np.concatenate([[record.t], parts]))
        lines.append(",".join(_fmt(value) for value in row))
    return _write_text(path, "\n".join(lines) + "\n")


def write_snapshot(path: Path, t: float, state: State, config: dict[str, Any],
                   tail: float, depth: float) -> Path:
    """Columns x eta v under a single header line; the config echo comes last."""
    echo = json.dumps(config, sort_keys=True, separators=(",", ":"))
    header = (f"t={_fmt(t)} tail={_fmt(tail)} min_depth={_fmt(depth)} columns=x,eta,v "
              f"config={echo}")
    rows = np.column_stack([state.grid.nodes, state.eta, state.v])
    return _savetxt(path, rows, header)


def write_waterfall(path: Path, times: Sequence[float], x: np.ndarray,
                    fields: Sequence[np.ndarray]) -> Path:
    """One row per time: t, then the field at each listed x."""
    rows = np.column_stack([np.asarray(times), np.asarray(fields)])
    header = "x " + " ".join(_fmt(value) for value in _finite(path.name, x))
    return _savetxt(path, rows, header)


def write_soliton_error(path: Path, state: State, exact: State) -> tuple[float, float]:
    """Pointwise |error| of eta and v against the exact solution; returns their maxima."""
    err_eta = np.abs(state.eta - exact.eta)
    err_v = np.abs(state.v - exact.v)
    max_eta, max_v = float(err_eta.max()), float(err_v.max())
    header = f"max_error_eta={_fmt(max_eta)} max_error_v={_fmt(max_v)}\nx err_eta err_v"
    _savetxt(path, np.column_stack([state.grid.nodes, err_eta, err_v]), header)
    return max_eta, max_v


def write_json(path: Path, record: dict[str, Any], schema_filename: str | None = None) -> Path:
    if schema_filename:
        validate_schema(record, schema_filename)
    try:
        text = json.dumps(record, sort_keys=True, indent=2, allow_nan=False)
    except ValueError as exc:
        raise OutputError(f"Refusing to write non-finite values to {path.name}") from exc
    return _write_text(path, text + "\n")


def write_csv(path: Path, columns: Sequence[str], rows: Sequence[dict[str, Any]]) -> Path:
    def cell(value: Any) -> str:
        if value is None:
            return ""
        if isinstance(value, float):
            return _fmt(value)
        return str(value).replace(",", ";")

    lines = [",".join(columns)]
    lines += [",".join(cell(row.get(column)) for column in columns) for row in rows]
    return _write_text(path, "\n".join(lines) + "\n")
