# Copyright 2025 Lincoln Institute of Land Policy
# SPDX-License-Identifier: MIT

import csv
import io

import orjson
import pytest

from cqnc.cli import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, build_parser, main
from cqnc.lib.constants import HBAR
from cqnc.lib.params import make_fig2_params


def _rows(path) -> list[list[str]]:
    text = path.read_text(encoding="utf-8")
    data = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return list(csv.reader(io.StringIO(data)))


@pytest.fixture
def matched_config(tmp_path):
    path = tmp_path / "matched.toml"
    path.write_text('preset = "cqnc-matched"\n', encoding="utf-8")
    return path


def test_psd(tmp_path):
    out = tmp_path / "psd.csv"
    assert main(["psd", "--grid", "R50/0.1/2", "--out", str(out)]) == EXIT_OK
    rows = _rows(out)
    header, body = rows[0], rows[1:]
    assert header[0] == "omega_over_Omega"
    assert "s_standard" in header and "s_cqnc_floor" in header
    assert "oracle.backaction" in header
    assert len(body) == 50
    assert float(body[0][0]) == pytest.approx(0.1)
    assert float(body[-1][0]) == pytest.approx(2.0)

    text = out.read_text(encoding="utf-8")
    assert "# command=psd" in text
    assert "# param.Omega=" in text


RERUNS = {
    "psd": ["psd", "--grid", "R20/0.5/1.5"],
    "power-sweep": ["power-sweep", "--powers", "R10/1e-12/1"],
    "check": ["check", "--grid", "R50/0.1/2"],
    "roots": ["roots"],
}


@pytest.mark.parametrize("fmt", ["csv", "json"])
@pytest.mark.parametrize("command", sorted(RERUNS))
def test_reruns_are_identical(tmp_path, command: str, fmt: str):
    outputs = [tmp_path / f"first.{fmt}", tmp_path / f"second.{fmt}"]
    statuses = [main([*RERUNS[command], "--format", fmt, "--out", str(out)]) for out in outputs]
    assert statuses[0] == statuses[1]
    assert statuses[0] in (EXIT_OK, EXIT_CHECK_FAILED)
    assert outputs[0].read_bytes() == outputs[1].read_bytes()


def test_psd_records_matched_values(tmp_path):
    out = tmp_path / "psd.csv"
    assert main(["psd", "--grid", "R10/0.5/1.5", "--out", str(out)]) == EXIT_OK
    metadata = dict(
        line[2:].split("=", 1) for line in out.read_text(encoding="utf-8").splitlines()
        if line.startswith("# ")
    )
    assert metadata["param.G_em"] == "0.0"
    assert metadata["matched.Delta_q"] == metadata["param.Omega"]
    assert metadata["matched.Gamma"] == metadata["param.gamma_m"]
    assert metadata["matched.G_em"] == metadata["param.g"]
    assert "matched.kappa" not in metadata


def test_newton_columns_with_mass(tmp_path):
    config = tmp_path / "heavy.toml"
    config.write_text("mass = 1.0e-12\n", encoding="utf-8")
    out = tmp_path / "psd.csv"
    args = ["psd", "--config", str(config), "--grid", "R10/0.5/1.5", "--out", str(out)]
    assert main(args) == EXIT_OK
    rows = _rows(out)
    header = rows[0]
    assert "s_standard[N2/Hz]" in header and "oracle[N2/Hz]" in header

    params = make_fig2_params()
    scale = HBAR * 1e-12 * params.Omega * params.gamma_m
    dimensionless = header.index("s_standard")
    converted = header.index("s_standard[N2/Hz]")
    for row in rows[1:]:
        assert float(row[converted]) == pytest.approx(float(row[dimensionless]) * scale, rel=1e-12)


def test_no_newton_columns_without_mass(tmp_path):
    out = tmp_path / "power.csv"
    assert main(["power-sweep", "--powers", "R5/1e-9/1e-3", "--out", str(out)]) == EXIT_OK
    assert not any(column.endswith("[N2/Hz]") for column in _rows(out)[0])


def test_psd_json(tmp_path):
    out = tmp_path / "psd.json"
    assert main(["psd", "--grid", "R10/0.5/1.5", "--format", "json", "--out", str(out)]) == EXIT_OK
    document = orjson.loads(out.read_bytes())
    assert document["columns"][0] == "omega_over_Omega"
    assert len(document["rows"]) == 10
    assert document["metadata"]["command"] == "psd"


def test_power_sweep(tmp_path):
    out = tmp_path / "power.csv"
    assert main(["power-sweep", "--powers", "R20/1e-12/1", "--out", str(out)]) == EXIT_OK
    rows = _rows(out)
    assert rows[0][:3] == ["P_L_watts", "g", "s_standard"]
    assert "s_hybrid[0.1kappa]" in rows[0]
    assert len(rows) == 21
    assert float(rows[1][0]) == pytest.approx(1e-12)


def test_check_passes_when_matched(tmp_path, matched_config):
    out = tmp_path / "check.csv"
    args = ["check", "--config", str(matched_config), "--grid", "R200/0.1/2", "--out", str(out)]
    assert main(args) == EXIT_OK
    assert "# result=pass" in out.read_text(encoding="utf-8")


def test_check_fails_without_matching(tmp_path):
    out = tmp_path / "check.csv"
    assert main(["check", "--grid", "R200/0.1/2", "--out", str(out)]) == EXIT_CHECK_FAILED
    assert "# result=fail" in out.read_text(encoding="utf-8")


def test_check_fails_when_preset_coupling_is_zeroed(tmp_path):
    config = tmp_path / "uncoupled.toml"
    config.write_text('preset = "cqnc-matched"\nG_em = 0.0\n', encoding="utf-8")
    out = tmp_path / "check.csv"
    args = ["check", "--config", str(config), "--grid", "R200/0.1/2", "--out", str(out)]
    assert main(args) == EXIT_CHECK_FAILED
    text = out.read_text(encoding="utf-8")
    assert "# result=fail" in text
    assert "# param.G_em=0.0" in text


def test_check_honors_mode(tmp_path, matched_config):
    out = tmp_path / "check.csv"
    args = ["check", "--config", str(matched_config), "--mode", "literal", "--grid", "R200/0.1/2"]
    # the literal wiring never couples the qubit to the cavity
    assert main([*args, "--out", str(out)]) == EXIT_CHECK_FAILED
    text = out.read_text(encoding="utf-8")
    assert "# mode=literal" in text
    assert "literal linear model vs closed-form coefficients" in text


def test_roots(tmp_path):
    out = tmp_path / "roots.csv"
    assert main(["roots", "--out", str(out)]) == EXIT_OK
    rows = _rows(out)
    assert rows[0] == ["variant", "index", "omega_re", "omega_im", "is_real", "residual"]
    variants = {row[0] for row in rows[1:]}
    assert variants == {"printed", "printed_dimensional", "exact", "companion"}
    assert len(rows) == 17


def test_missing_config_writes_nothing(tmp_path):
    out = tmp_path / "never.csv"
    status = main(["psd", "--config", str(tmp_path / "absent.toml"), "--out", str(out)])
    assert status == EXIT_USAGE
    assert not out.exists()


def test_malformed_config(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text('mode = "sideways"\n', encoding="utf-8")
    assert main(["psd", "--config", str(path)]) == EXIT_USAGE


def test_malformed_grid():
    assert main(["psd", "--grid", "2/1"]) == EXIT_USAGE


def test_unknown_flag_value():
    with pytest.raises(SystemExit) as err:
        build_parser().parse_args(["psd", "--mode", "sideways"])
    assert err.value.code == 2

    with pytest.raises(SystemExit):
        main([])
