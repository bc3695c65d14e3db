# Copyright 2025 Lincoln Institute of Land Policy
# SPDX-License-Identifier: MIT

import csv
import io
import logging
import math
from pathlib import Path
import sys
from typing import Any, Literal, Optional, Sequence

from com.helpers import format_float
import msgspec
import numpy as np
import orjson

from cqnc.lib.analysis import SweepResult
from cqnc.lib.params import PhysicalParams, to_newtons

LOGGER = logging.getLogger(__name__)

POLE = "pole"

OutputFormat = Literal["csv", "json"]


class Table(msgspec.Struct):
    columns: list[str]
    rows: list[list[Any]]
    metadata: dict[str, str] = msgspec.field(default_factory=dict)


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, int, np.floating, np.integer)):
        if not math.isfinite(value):
            return POLE
        return format_float(value)
    return str(value)


def _json_cell(value: Any) -> Any:
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else POLE
    return value


def params_metadata(
    params: PhysicalParams, prefix: str = "param", fields: Optional[Sequence[str]] = None
) -> dict[str, str]:
    values = params.model_dump(include=None if fields is None else set(fields))
    return {f"{prefix}.{name}": _cell(value) for name, value in values.items()}


def render_csv(table: Table) -> str:
    buffer = io.StringIO()
    for key in sorted(table.metadata):
        buffer.write(f"# {key}={table.metadata[key]}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        if len(row) != len(table.columns):
            raise ValueError(f"Row has {len(row)} cells but the header has {len(table.columns)}")
        writer.writerow([_cell(value) for value in row])
    return buffer.getvalue()


def render_json(table: Table) -> str:
    document = {
        "metadata": table.metadata,
        "columns": table.columns,
        "rows": [[_json_cell(value) for value in row] for row in table.rows],
    }
    return orjson.dumps(document, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS).decode() + "\n"


def render(table: Table, fmt: OutputFormat) -> str:
    if fmt == "csv":
        return render_csv(table)
    if fmt == "json":
        return render_json(table)
    raise ValueError(f"Unknown output format {fmt}")


def write_table(table: Table, fmt: OutputFormat, out: Optional[str | Path] = None) -> None:
    """Render first, then write once, so a failure never leaves a partial file"""
    text = render(table, fmt)
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(out, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    LOGGER.info(f"Wrote {len(table.rows)} rows to {out}")


def sweep_table(
    result: SweepResult,
    first_column: str,
    axis: np.ndarray,
    components_of: Optional[str] = None,
    metadata: Optional[dict[str, str]] = None,
    newtons: Optional[PhysicalParams] = None,
) -> Table:
    """
    One row per axis point: the axis, any extra columns, each series total and,
    for the series named by `components_of`, its per-channel budget. With
    `newtons` (params carrying a mass) every series total is repeated in N²/Hz.
    """
    columns = [first_column, *result.extra]
    data: list[np.ndarray] = [axis, *result.extra.values()]
    for label, budget in result.series.items():
        columns.append(label)
        data.append(budget.total)
    if components_of is not None:
        budget = result.series[components_of]
        for name, values in budget.components().items():
            columns.append(f"{components_of}.{name}")
            data.append(values)
    if newtons is not None:
        for label, budget in result.series.items():
            columns.append(f"{label}[N2/Hz]")
            data.append(to_newtons(newtons, budget.total))

    rows = [[float(column[i]) for column in data] for i in range(result.size)]
    merged = dict(metadata or {})
    merged.update({f"summary.{key}": value for key, value in result.summary.items()})
    for i, warning in enumerate(result.warnings):
        merged[f"warning.{i}"] = warning
    return Table(columns=columns, rows=rows, metadata=merged)
