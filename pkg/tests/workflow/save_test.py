from __future__ import annotations

import json
import math

import pandas as pd
import pytest

from src.physics.spectrum import ScanRow
from src.workflow.save import emit_table, render_table, save_to_file, scan_table


def test_render_csv_uses_full_precision():
    table = pd.DataFrame({"n": [0, 1], "E": [1 / 3, math.nan]})
    content = render_table(table, "csv")

    assert content.splitlines() == ["n,E", "0,0.33333333333333331", "1,NaN"]
    assert render_table(table, "csv") == content


def test_render_json_maps_nan_to_null():
    table = pd.DataFrame({"n": [0, 1], "E": [2.5, math.nan], "free": ["alpha", "alpha"]})
    data = json.loads(render_table(table, "json"))

    assert data == {"n": [0, 1], "E": [2.5, None], "free": ["alpha", "alpha"]}


def test_render_rejects_unknown_format():
    with pytest.raises(ValueError):
        render_table(pd.DataFrame({"x": [1.0]}), "xml")


def test_scan_table_keeps_failed_rows():
    rows = [
        ScanRow(param_value=0.5, n=0, energy=2.0, residual_coeff=0.0),
        ScanRow(param_value=1.0, n=0, energy=math.nan, residual_coeff=math.nan, error="no root"),
    ]
    table = scan_table("alpha", rows)

    assert list(table.columns) == ["alpha", "n", "E", "residual_coeff"]
    assert table["n"].dtype == "int64"
    assert math.isnan(table["E"].iloc[1])


def test_save_to_file_creates_directories(tmp_path):
    path = save_to_file("a,b\n", str(tmp_path / "out" / "table.csv"))
    with open(path, encoding="utf-8") as f:
        assert f.read() == "a,b\n"


def test_emit_table_to_stdout(capsys):
    emit_table(pd.DataFrame({"x": [1.5]}), "csv")
    assert capsys.readouterr().out == "x\n1.5\n"
