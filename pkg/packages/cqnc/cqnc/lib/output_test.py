# Copyright 2025 Lincoln Institute of Land Policy
# SPDX-License-Identifier: MIT

import csv
import io

import numpy as np
import orjson
import pytest

from cqnc.lib.analysis import fig2_series, sweep_frequency
from cqnc.lib.output import (
    POLE,
    Table,
    params_metadata,
    render,
    render_csv,
    render_json,
    sweep_table,
    write_table,
)
from cqnc.lib.params import PhysicalParams
from cqnc.lib.response import FrequencyGrid


@pytest.fixture
def table() -> Table:
    return Table(
        columns=["omega", "total", "passed", "note"],
        rows=[[0.1, 1 / 3, True, None], [0.2, float("nan"), False, "x"]],
        metadata={"zeta": "last", "alpha": "first"},
    )


def _data_lines(text: str) -> list[str]:
    return [line for line in text.splitlines() if not line.startswith("#")]


def test_render_csv(table: Table):
    text = render_csv(table)
    lines = text.splitlines()
    assert lines[:2] == ["# alpha=first", "# zeta=last"]

    rows = list(csv.reader(io.StringIO("\n".join(_data_lines(text)))))
    assert rows[0] == ["omega", "total", "passed", "note"]
    assert rows[1] == ["0.1", repr(1 / 3), "true", ""]
    assert rows[2] == ["0.2", POLE, "false", "x"]
    assert float(rows[1][1]) == 1 / 3


def test_render_csv_rejects_ragged_rows():
    with pytest.raises(ValueError):
        render_csv(Table(columns=["a", "b"], rows=[[1.0]]))


def test_render_json(table: Table):
    document = orjson.loads(render_json(table))
    assert document["columns"] == table.columns
    assert document["rows"][0] == [0.1, 1 / 3, True, None]
    assert document["rows"][1][1] == POLE
    assert document["metadata"] == {"alpha": "first", "zeta": "last"}


def test_render_unknown_format(table: Table):
    with pytest.raises(ValueError):
        render(table, "xml")


def test_write_table(table: Table, tmp_path, capsys):
    target = tmp_path / "out.csv"
    write_table(table, "csv", target)
    assert target.read_text(encoding="utf-8") == render_csv(table)

    write_table(table, "json", None)
    assert capsys.readouterr().out == render_json(table)


def test_params_metadata(fig2_params: PhysicalParams):
    metadata = params_metadata(fig2_params)
    assert float(metadata["param.Omega"]) == fig2_params.Omega
    assert metadata["param.G_qubit"] == ""
    assert "param.g" in metadata


def test_sweep_table(fig2_params: PhysicalParams):
    grid = FrequencyGrid.spaced(fig2_params, 0.5, 1.5, 5)
    result = sweep_frequency(fig2_series(fig2_params, gains=(0.0,)), grid)
    table = sweep_table(
        result,
        "omega_over_Omega",
        grid.omega / fig2_params.Omega,
        components_of="s_cqnc_floor",
        metadata={"command": "psd"},
    )
    assert table.columns[:4] == [
        "omega_over_Omega",
        "s_standard",
        "s_hybrid_opa[G=0kappa]",
        "s_cqnc_floor",
    ]
    assert "s_cqnc_floor.qubit_p" in table.columns
    assert len(table.rows) == 5
    assert table.rows[0][0] == pytest.approx(0.5)
    assert table.metadata["command"] == "psd"

    floor_column = table.columns.index("s_cqnc_floor")
    assert np.allclose(
        [row[floor_column] for row in table.rows], result.series["s_cqnc_floor"].total
    )


def test_params_metadata_subset(matched_params: PhysicalParams):
    metadata = params_metadata(matched_params, "matched", ("Delta_q", "G_em"))
    assert sorted(metadata) == ["matched.Delta_q", "matched.G_em"]
    assert float(metadata["matched.G_em"]) == matched_params.g


def test_sweep_table_in_newtons(fig2_params: PhysicalParams):
    heavy = fig2_params.replace(mass=2e-12)
    grid = FrequencyGrid.spaced(heavy, 0.5, 1.5, 4)
    result = sweep_frequency(fig2_series(heavy, gains=()), grid)
    table = sweep_table(result, "omega_over_Omega", grid.omega / heavy.Omega, newtons=heavy)
    assert table.columns == [
        "omega_over_Omega",
        "s_standard",
        "s_cqnc_floor",
        "s_standard[N2/Hz]",
        "s_cqnc_floor[N2/Hz]",
    ]
    scale = heavy.force_psd_scale
    for row in table.rows:
        assert row[3] == pytest.approx(row[1] * scale, rel=1e-15)
        assert row[4] == pytest.approx(row[2] * scale, rel=1e-15)
