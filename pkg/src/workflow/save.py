from __future__ import annotations

import json
import os
import sys

import numpy as np
import pandas as pd

from src.physics.spectrum import BoundState, ScanRow
from src.physics.wavefunction import WaveTable
from src.utils.logging_config import run_logger

FLOAT_FORMAT = "%.17g"


def states_table(states: list[BoundState]) -> pd.DataFrame:
    """One row per bound state: n, E, residual_energy, residual_coeff."""
    return pd.DataFrame(
        {
            "n": [s.n for s in states],
            "E": [s.energy for s in states],
            "residual_energy": [s.residual_energy for s in states],
            "residual_coeff": [s.residual_coeff for s in states],
        },
        columns=["n", "E", "residual_energy", "residual_coeff"],
    )


def joint_table(state: BoundState) -> pd.DataFrame:
    name, value = state.free_param
    table = states_table([state])
    table.insert(2, "free", name)
    table.insert(3, "free_value", value)
    return table


def wave_table(wt: WaveTable) -> pd.DataFrame:
    return pd.DataFrame({"x": wt.xs, "psi": wt.psi})


def scan_table(param: str, rows: list[ScanRow]) -> pd.DataFrame:
    """Sweep rows; failed (value, n) pairs keep NaN energy and coefficient."""
    return pd.DataFrame(
        {
            param: [r.param_value for r in rows],
            "n": pd.Series([r.n for r in rows], dtype="int64"),
            "E": [r.energy for r in rows],
            "residual_coeff": [r.residual_coeff for r in rows],
        },
        columns=[param, "n", "E", "residual_coeff"],
    )


def _json_value(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return None if np.isnan(value) else float(value)
    return value


def render_table(table: pd.DataFrame, fmt: str = "csv") -> str:
    """
    Serialize a table deterministically.

    CSV uses a header row and %.17g floats; JSON maps each column to a list,
    with NaN written as null.
    """
    if fmt == "csv":
        return table.to_csv(index=False, float_format=FLOAT_FORMAT, na_rep="NaN", lineterminator="\n")
    if fmt == "json":
        columns = {col: [_json_value(v) for v in table[col].tolist()] for col in table.columns}
        return json.dumps(columns, indent=2) + "\n"
    raise ValueError(f"unsupported format: {fmt}")


def save_to_file(content: str, file_path: str) -> str:
    """Save content to file and return the path"""
    directory = os.path.dirname(file_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(file_path, "w", encoding="utf-8") as f:
        f.write(content)
    return file_path


def emit_table(table: pd.DataFrame, fmt: str = "csv", out: str | None = None) -> str:
    """Write the rendered table to `out`, or to stdout when out is None."""
    content = render_table(table, fmt)
    if out:
        path = save_to_file(content, out)
        run_logger().info(f"Wrote {len(table)} row(s) to {path}")
    else:
        sys.stdout.write(content)
    return content
